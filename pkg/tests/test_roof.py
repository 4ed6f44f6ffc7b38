import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entmono.errors import InputError
from entmono.measures import (
    coa_closed_form,
    concurrence_pure,
    negativity_pure,
    wootters_concurrence,
)
from entmono.roof import (
    Decomposition,
    RoofConfig,
    eigen_ensemble,
    hjw_decomposition,
    optimize_roof,
)
from entmono.states import antisymmetric_333, ghz, random_mixed, random_pure, w_state
from entmono.tensor import Bipartition, partial_trace

PAIR = Bipartition((0,), (1,))
FAST = RoofConfig(restarts=16)


def _isometry(rng, m, r):
    x = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    q, _ = np.linalg.qr(x)
    return q


def test_decomposition_validates_weights():
    v = np.eye(2, dtype=complex)
    with pytest.raises(InputError):
        Decomposition((2,), np.array([0.5, 0.6]), v)
    with pytest.raises(InputError):
        Decomposition((2,), np.array([1.0, 0.0]), v)
    d = Decomposition((2,), np.array([0.25, 0.75]), v)
    assert len(d) == 2
    assert np.allclose(d.matrix(), np.diag([0.25, 0.75]))


def test_config_defaults_and_errors():
    cfg = RoofConfig()
    assert (cfg.restarts, cfg.iterations, cfg.seed) == (64, 500, 0)
    assert cfg.members_for(2) == 4 and cfg.members_for(3) == 6
    with pytest.raises(InputError):
        RoofConfig(ensemble_size=2).members_for(3)
    with pytest.raises(InputError):
        RoofConfig(restarts=0)


def test_hjw_identity_gives_eigen_ensemble():
    rho = random_mixed((2, 2), 3, seed=4)
    d = hjw_decomposition(rho, np.eye(3))
    w = np.linalg.eigvalsh(rho.matrix)[::-1][:3]
    assert np.allclose(np.sort(d.weights)[::-1], w, atol=1e-12)
    assert d.residual(rho) < 1e-12


def test_hjw_reconstructs_for_any_isometry():
    rng = np.random.default_rng(0)
    rho = random_mixed((2, 3), 4, seed=9)
    for m in (4, 6, 9):
        d = hjw_decomposition(rho, _isometry(rng, m, 4))
        assert d.residual(rho) <= 1e-8
        assert d.weights.sum() == pytest.approx(1, abs=1e-10)


def test_hjw_rejects_non_isometry():
    rho = random_mixed((2, 2), 2, seed=1)
    with pytest.raises(InputError):
        hjw_decomposition(rho, np.ones((3, 2)))
    with pytest.raises(InputError):
        hjw_decomposition(rho, np.eye(3))


def test_rotating_decomposition_changes_members():
    # diag(a^2, b^2) on |00>, |11>: rotations sweep between product and entangled members
    rho = partial_trace(ghz(3, 0.6, 0.8), (0, 1))
    values = []
    for theta in np.linspace(0, np.pi / 4, 5):
        v = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])
        d = hjw_decomposition(rho, v)
        assert d.residual(rho) < 1e-12
        values.append(d.average(lambda psi: concurrence_pure(psi, PAIR).value))
    assert values[0] == pytest.approx(0, abs=1e-12)
    assert values[-1] == pytest.approx(0.96, abs=1e-12)
    assert np.all(np.diff(values) > 0)


def test_pure_input_bypasses_search():
    psi = random_pure((2, 3), 2)
    mv = optimize_roof(psi, PAIR, "negativity", "max", FAST)
    assert mv.bound == "exact"
    assert mv.value == pytest.approx(negativity_pure(psi, PAIR).value, abs=1e-12)


def test_ghz_pair_max_roof():
    rho = partial_trace(ghz(3, 0.6, 0.8), (0, 1))
    mv = optimize_roof(rho, PAIR, "negativity", "max", FAST)
    assert mv.bound == "lower"
    assert mv.value == pytest.approx(2 * 0.6 * 0.8, abs=1e-6)
    assert mv.squared == pytest.approx(4 * 0.36 * 0.64, abs=1e-6)


def test_w_pair_max_roof():
    mv = optimize_roof(partial_trace(w_state(3), (0, 1)), PAIR, "negativity", "max", FAST)
    assert mv.value == pytest.approx(2 / 3, abs=1e-6)


def test_min_roof_is_upper_bound():
    rho = random_mixed((2, 2), 2, seed=11)
    mv = optimize_roof(rho, PAIR, "concurrence", "min", FAST)
    assert mv.bound == "upper"
    assert mv.value >= wootters_concurrence(rho).value - 1e-9
    assert mv.value == pytest.approx(wootters_concurrence(rho).value, abs=5e-3)


def test_antisymmetric_pair_is_flat():
    # every vector in the antisymmetric 3x3 subspace has negativity 1
    rho = partial_trace(antisymmetric_333(), (0, 1))
    hi = optimize_roof(rho, PAIR, "negativity", "max", FAST)
    lo = optimize_roof(rho, PAIR, "negativity", "min", FAST)
    assert hi.value == pytest.approx(1, abs=1e-9)
    assert lo.value == pytest.approx(1, abs=1e-9)


def test_witness_reproduces_value():
    rho = random_mixed((2, 3), 3, seed=5)
    part = Bipartition((0,), (1,))
    for measure, fn in (("negativity", negativity_pure), ("concurrence", concurrence_pure)):
        for objective in ("min", "max"):
            mv = optimize_roof(rho, part, measure, objective, FAST)
            assert mv.witness.residual(rho) <= 1e-8
            assert mv.witness.average(lambda psi: fn(psi, part).value) == pytest.approx(mv.value, abs=1e-8)


def test_grouped_partition_ordering():
    # side A = {1} of a three-qubit state must be handled by axis permutation
    rho = random_mixed((2, 2, 2), 2, seed=3)
    a = optimize_roof(rho, Bipartition((1,), (0, 2)), "negativity", "max", FAST)
    b = optimize_roof(rho, Bipartition((0, 2), (1,)), "negativity", "max", FAST)
    assert a.value == pytest.approx(b.value, abs=1e-6)
    assert a.witness.residual(rho) < 1e-8


def test_deterministic_for_any_thread_count():
    rho = random_mixed((2, 2), 3, seed=8)
    runs = [optimize_roof(rho, PAIR, "negativity", "max", RoofConfig(restarts=48, threads=t))
            for t in (1, 2, 4)]
    assert len({r.value for r in runs}) == 1
    assert len({r.evaluations for r in runs}) == 1
    assert np.array_equal(runs[0].witness.vectors, runs[2].witness.vectors)


def test_more_restarts_never_worse():
    rho = random_mixed((2, 3), 3, seed=2)
    part = Bipartition((0,), (1,))
    values = [optimize_roof(rho, part, "negativity", "max", RoofConfig(restarts=k, iterations=60)).value
              for k in (1, 4, 16, 32)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_bad_arguments():
    rho = random_mixed((2, 2), 2, seed=0)
    with pytest.raises(InputError):
        optimize_roof(rho, PAIR, "entropy", "max", FAST)
    with pytest.raises(InputError):
        optimize_roof(rho, PAIR, "negativity", "best", FAST)
    with pytest.raises(InputError):
        optimize_roof(rho, PAIR, "negativity", "max", RoofConfig(ensemble_size=1))


def test_eigen_ensemble_rows():
    rho = random_mixed((2, 2), 2, seed=6)
    b = eigen_ensemble(rho)
    assert b.shape == (2, 4)
    assert np.allclose(b.T @ b.conj(), rho.matrix, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 100_000), rank=st.integers(2, 4))
def test_max_roof_never_exceeds_closed_form(seed, rank):
    rho = random_mixed((2, 2), rank, seed)
    cfg = RoofConfig(restarts=4, iterations=150)
    hi = optimize_roof(rho, PAIR, "negativity", "max", cfg)
    lo = optimize_roof(rho, PAIR, "negativity", "min", cfg)
    assert hi.value <= coa_closed_form(rho).value + 1e-9
    assert lo.value >= wootters_concurrence(rho).value - 1e-9
