"""Constructors for the state families used throughout the package.

Basis labels for the antisymmetric qutrit state run 1..3 in the usual
notation; here they map onto local indices 0..2.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from .errors import InputError, InvariantError
from .tensor import STRUCT_TOL, MixedState, PureState, _check_dims

NORM_SLACK = 1e-6


def _basis_index(dims: Sequence[int], digits: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(digits), tuple(dims)))


def _renormalize(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    norm2 = float(np.sum(np.abs(c) ** 2))
    if abs(norm2 - 1) > NORM_SLACK:
        raise InvariantError(f"coefficients have squared norm {norm2!r}, expected 1")
    return c / np.sqrt(norm2)


def _ket(dims, terms) -> PureState:
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    for digits, c in terms:
        amps[_basis_index(dims, digits)] += c
    return PureState(tuple(dims), amps)


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> PureState:
    return _ket(dims, [(digits, 1.0)])


def ghz(n: int, a: complex, b: complex) -> PureState:
    if n < 2:
        raise InputError("GHZ state needs n >= 2")
    a, b = _renormalize([a, b])
    return _ket([2] * n, [([0] * n, a), ([1] * n, b)])


def w_state(n: int) -> PureState:
    if n < 2:
        raise InputError("W state needs n >= 2")
    amp = 1 / np.sqrt(n)
    terms = [([1 if k == s else 0 for k in range(n)], amp) for s in range(n)]
    return _ket([2] * n, terms)


def antisymmetric_333() -> PureState:
    terms = []
    for perm in permutations(range(3)):
        # parity via inversion count
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        terms.append((perm, (-1) ** inv / np.sqrt(6)))
    return _ket([3, 3, 3], terms)


@dataclass(frozen=True, eq=False)
class WClassCoefficients:
    """Coefficients a[s, i-1] of the excitation |i> on party s, i = 1..d-1."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 1:
            raise InputError("coefficients must be an n x (d-1) array with n >= 2, d >= 2")
        if not np.all(np.isfinite(a)):
            raise InvariantError("coefficients must be finite")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1) > STRUCT_TOL:
            raise InvariantError(f"coefficients have squared norm {norm2!r}, expected 1")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def normalized(cls, raw) -> "WClassCoefficients":
        raw = np.asarray(raw, dtype=complex)
        return cls(raw / np.linalg.norm(raw))

    @classmethod
    def uniform(cls, n: int, d: int) -> "WClassCoefficients":
        return cls(np.full((n, d - 1), 1 / np.sqrt(n * (d - 1)), dtype=complex))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1] + 1

    def weights(self) -> np.ndarray:
        """Per-party excitation weight sum_i |a_si|^2."""
        return np.sum(np.abs(self.a) ** 2, axis=1)


def _w_class_amplitudes(c: WClassCoefficients) -> np.ndarray:
    n, d = c.n, c.d
    dims = [d] * n
    amps = np.zeros(d**n, dtype=complex)
    for s in range(n):
        for i in range(1, d):
            digits = [0] * n
            digits[s] = i
            amps[_basis_index(dims, digits)] = c.a[s, i - 1]
    return amps


def generalized_w_class(c: WClassCoefficients) -> PureState:
    return PureState((c.d,) * c.n, _w_class_amplitudes(c))


def w_vacuum_superposition(p: float, c: WClassCoefficients) -> PureState:
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    if p == 1:
        return generalized_w_class(c)
    amps = np.sqrt(p) * _w_class_amplitudes(c)
    amps[0] += np.sqrt(1 - p)
    return PureState((c.d,) * c.n, amps)


def theorem1_saturating(a: complex, b: complex | None = None) -> PureState:
    """a|010> + b|100>; b defaults to the real value completing the norm."""
    if b is None:
        b = np.sqrt(max(0.0, 1 - abs(a) ** 2))
    a, b = _renormalize([a, b])
    return _ket([2] * 3, [((0, 1, 0), a), ((1, 0, 0), b)])


def theorem2_saturating(a: complex, b: complex, c: complex) -> PureState:
    """a|0100> + b|0010> + c|0001>."""
    a, b, c = _renormalize([a, b, c])
    return _ket([2] * 4, [((0, 1, 0, 0), a), ((0, 0, 1, 0), b), ((0, 0, 0, 1), c)])


def theorem3_saturating(a: complex, b: complex, c: complex) -> PureState:
    """a|1000> + b|0010> + c|0001>."""
    a, b, c = _renormalize([a, b, c])
    return _ket([2] * 4, [((1, 0, 0, 0), a), ((0, 0, 1, 0), b), ((0, 0, 0, 1), c)])


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure(dims: Sequence[int], seed: int) -> PureState:
    dims = _check_dims(dims)
    v = _complex_gaussian(np.random.default_rng(seed), int(np.prod(dims)))
    return PureState(dims, v / np.linalg.norm(v))


def random_mixed(dims: Sequence[int], rank: int, seed: int) -> MixedState:
    dims = _check_dims(dims)
    total = int(np.prod(dims))
    if not 1 <= rank <= total:
        raise InputError(f"rank must lie in [1, {total}], got {rank}")
    v = _complex_gaussian(np.random.default_rng(seed), (total, rank))
    rho = v @ v.conj().T
    rho = (rho + rho.conj().T) / 2
    return MixedState(dims, rho / np.trace(rho).real)
