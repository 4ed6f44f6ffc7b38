import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entmono.errors import InputError, InvariantError
from entmono.states import antisymmetric_333, ghz, random_mixed, random_pure, w_state
from entmono.tensor import (
    Bipartition,
    MixedState,
    PureState,
    hermitian_eig,
    partial_trace,
    partial_transpose,
    pure_to_mixed,
    schmidt_coefficients,
    trace_norm,
)

BELL = PureState((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_pure_state_rejects_bad_norm():
    with pytest.raises(InvariantError):
        PureState((2,), [1, 1])
    with pytest.raises(InputError):
        PureState((2, 2), [1, 0, 0])
    with pytest.raises(InputError):
        PureState((1, 2), [1, 0])


def test_normalized_accepts_small_drift():
    psi = PureState.normalized((2,), [1 + 1e-8, 0])
    assert np.isclose(np.linalg.norm(psi.amplitudes), 1, atol=1e-15)
    with pytest.raises(InvariantError):
        PureState.normalized((2,), [1.1, 0])


def test_mixed_state_checks():
    with pytest.raises(InvariantError):
        MixedState((2,), [[0.5, 0.1], [0.0, 0.5]])
    with pytest.raises(InvariantError):
        MixedState((2,), [[0.6, 0], [0, 0.6]])
    with pytest.raises(InvariantError):
        MixedState((2,), [[1.5, 0], [0, -0.5]])


def test_bipartition_parse():
    assert Bipartition.parse(" 0 | 1, 2 ") == Bipartition((0,), (1, 2))
    assert str(Bipartition.parse("1,0|2")) == "1,0|2"
    for bad in ("0|0", "0,1", "|1", "a|b", "0|1|2"):
        with pytest.raises(InputError):
            Bipartition.parse(bad)
    with pytest.raises(InputError):
        Bipartition((0,), (2,)).validate(3)


def test_ghz_marginal():
    rho = partial_trace(ghz(3, 0.6, 0.8), [0])
    assert np.allclose(rho.matrix, np.diag([0.36, 0.64]), atol=1e-12)


def test_w_marginal():
    rho = partial_trace(w_state(3), [0])
    assert np.allclose(rho.matrix, np.diag([2 / 3, 1 / 3]), atol=1e-12)


def test_partial_trace_keeps_order():
    # product of distinct single-qubit states
    a = np.array([1, 0])
    b = np.array([0, 1])
    c = np.array([1, 1]) / np.sqrt(2)
    psi = PureState((2, 2, 2), np.kron(np.kron(a, b), c))
    rho = partial_trace(psi, [2, 0])
    assert np.allclose(rho.matrix, np.kron(np.outer(a, a), np.outer(c, c)))


def test_partial_trace_errors():
    with pytest.raises(InputError):
        partial_trace(w_state(3), [])
    with pytest.raises(InputError):
        partial_trace(w_state(3), [3])


def test_partial_transpose_bell_trace_norm():
    pt = partial_transpose(BELL, Bipartition((0,), (1,)))
    assert trace_norm(pt) == pytest.approx(2.0, abs=1e-12)


def test_trace_norm_identity_and_errors():
    assert trace_norm(np.eye(5)) == pytest.approx(5.0)
    with pytest.raises(InputError):
        trace_norm(np.ones((2, 3)))


def test_trace_norm_matches_eigenvalues():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = x + x.conj().T
        assert trace_norm(h) == pytest.approx(np.abs(np.linalg.eigvalsh(h)).sum(), abs=1e-10)


def test_schmidt_coefficients():
    prod = PureState((2, 2), [1, 0, 0, 0])
    assert np.allclose(schmidt_coefficients(prod, Bipartition((0,), (1,))), [1, 0])
    assert np.allclose(schmidt_coefficients(BELL, Bipartition((0,), (1,))), [0.5, 0.5])
    lam = schmidt_coefficients(antisymmetric_333(), Bipartition((0,), (1, 2)))
    assert np.allclose(lam, [1 / 3] * 3, atol=1e-12)


def test_hermitian_eig_descending():
    w, v = hermitian_eig(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(w, [3, 2, 1])
    assert np.allclose(v.conj().T @ v, np.eye(3))
    with pytest.raises(InvariantError):
        hermitian_eig([[0, 1], [0, 0]])


dims_strategy = st.lists(st.integers(2, 3), min_size=2, max_size=3)


@settings(max_examples=40, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10_000), data=st.data())
def test_partial_trace_is_a_state(dims, seed, data):
    rho = random_mixed(dims, rank=2, seed=seed)
    keep = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1))
    red = partial_trace(rho, keep)
    assert np.trace(red.matrix).real == pytest.approx(1, abs=1e-10)
    assert np.linalg.eigvalsh(red.matrix)[0] > -1e-10


@settings(max_examples=40, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10_000))
def test_partial_transpose_matches_index_swap(dims, seed):
    rho = random_mixed(dims, rank=3, seed=seed)
    pt = partial_transpose(rho, Bipartition.split(len(dims), (0,)))
    assert np.trace(pt) == pytest.approx(1, abs=1e-12)
    # <i r| rho^T_A |j s> = <j r| rho |i s>
    d0, rest = dims[0], int(np.prod(dims[1:]))
    t = rho.matrix.reshape(d0, rest, d0, rest)
    oracle = np.transpose(t, (2, 1, 0, 3)).reshape(rho.matrix.shape)
    assert np.allclose(pt, oracle, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10_000))
def test_pure_marginal_spectra_match(dims, seed):
    psi = random_pure(dims, seed)
    n = len(dims)
    part = Bipartition.split(n, (0,))
    wa = np.linalg.eigvalsh(partial_trace(psi, part.side_a).matrix)[::-1]
    wb = np.linalg.eigvalsh(partial_trace(psi, part.side_b).matrix)[::-1]
    lam = schmidt_coefficients(psi, part)
    assert np.allclose(wa[: lam.size], lam, atol=1e-10)
    assert np.allclose(wb[: lam.size], lam, atol=1e-10)
    assert np.allclose(pure_to_mixed(psi).matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()))
