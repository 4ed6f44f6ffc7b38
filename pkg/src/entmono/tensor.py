"""Dense linear algebra on multi-qudit Hilbert spaces.

Subsystem 0 is the leftmost tensor factor. Every routine that groups
subsystems into two sides permutes axes explicitly before reshaping.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, InvariantError

STRUCT_TOL = 1e-10
SPECTRAL_TOL = 1e-8
CLIP_TOL = 1e-9


def _check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise InputError("dims must be nonempty")
    if any(d < 2 for d in dims):
        raise InputError(f"every subsystem dimension must be >= 2, got {dims}")
    return dims


def as_matrix(m, square: bool = True) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvariantError("matrix has non-finite entries")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != prod(dims):
            raise InputError(f"{amps.size} amplitudes do not match dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise InvariantError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > STRUCT_TOL:
            raise InvariantError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, dims, amplitudes, slack: float = 1e-6) -> "PureState":
        """Renormalize amplitudes whose norm is within `slack` of one."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1) > slack:
            raise InvariantError(f"squared norm {norm2!r} is off by more than {slack}")
        return cls(dims, amps / np.sqrt(norm2))

    @property
    def n(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def __repr__(self):
        return f"PureState(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class MixedState:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = as_matrix(self.matrix)
        if m.shape[0] != prod(dims):
            raise InputError(f"matrix side {m.shape[0]} does not match dims {dims}")
        if np.max(np.abs(m - m.conj().T)) > STRUCT_TOL:
            raise InvariantError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1) > STRUCT_TOL:
            raise InvariantError(f"density matrix trace {tr!r} differs from 1")
        if np.linalg.eigvalsh(m)[0] < -CLIP_TOL:
            raise InvariantError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return len(self.dims)

    def __repr__(self):
        return f"MixedState(dims={self.dims})"


@dataclass(frozen=True)
class Bipartition:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(i) for i in self.side_a)
        b = tuple(int(i) for i in self.side_b)
        if not a or not b:
            raise InputError("both sides of a bipartition must be nonempty")
        if len(set(a)) != len(a) or len(set(b)) != len(b) or set(a) & set(b):
            raise InputError(f"bipartition sides overlap or repeat: {a}|{b}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        """Parse ``"0|1,2"``; whitespace is ignored."""
        text = "".join(text.split())
        if text.count("|") != 1:
            raise InputError(f"partition {text!r} needs exactly one '|'")
        left, right = text.split("|")
        try:
            a = [int(x) for x in left.split(",")] if left else []
            b = [int(x) for x in right.split(",")] if right else []
        except ValueError as exc:
            raise InputError(f"bad partition {text!r}") from exc
        return cls(tuple(a), tuple(b))

    @classmethod
    def split(cls, n: int, side_a: Iterable[int]) -> "Bipartition":
        a = tuple(side_a)
        return cls(a, tuple(i for i in range(n) if i not in a))

    def validate(self, n: int) -> None:
        if sorted(self.side_a + self.side_b) != list(range(n)):
            raise InputError(f"partition {self} does not cover subsystems 0..{n - 1}")

    def __str__(self):
        return ",".join(map(str, self.side_a)) + "|" + ",".join(map(str, self.side_b))


def _permuted_matrix(psi: PureState, part: Bipartition) -> np.ndarray:
    part.validate(psi.n)
    da = prod(psi.dims[i] for i in part.side_a)
    t = np.transpose(psi.tensor(), part.side_a + part.side_b)
    return t.reshape(da, -1)


def pure_to_mixed(psi: PureState) -> MixedState:
    v = psi.amplitudes
    return MixedState(psi.dims, np.outer(v, v.conj()))


def as_mixed(state) -> MixedState:
    if isinstance(state, MixedState):
        return state
    if isinstance(state, PureState):
        return pure_to_mixed(state)
    raise InputError(f"expected a PureState or MixedState, got {type(state).__name__}")


def _reduced_matrix(dims: Sequence[int], matrix: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    rest = [i for i in range(n) if i not in keep]
    dk = prod(dims[i] for i in keep)
    dr = prod(dims[i] for i in rest)
    t = matrix.reshape(tuple(dims) * 2)
    order = list(keep) + rest
    t = np.transpose(t, order + [n + i for i in order]).reshape(dk, dr, dk, dr)
    return np.einsum("iaja->ij", t)


def partial_trace(rho, keep: Iterable[int]) -> MixedState:
    """Reduced state on `keep`, subsystems kept in their original order."""
    rho = as_mixed(rho)
    keep = sorted(set(int(i) for i in keep))
    if not keep:
        raise InputError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= rho.n:
        raise InputError(f"keep {keep} out of range for {rho.n} subsystems")
    if len(keep) == rho.n:
        return rho
    red = _reduced_matrix(rho.dims, rho.matrix, keep)
    red = (red + red.conj().T) / 2
    return MixedState(tuple(rho.dims[i] for i in keep), red)


def reduced_pure(psi: PureState, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full projector."""
    keep = tuple(sorted(set(int(i) for i in keep)))
    m = _permuted_matrix(psi, Bipartition.split(psi.n, keep))
    return m @ m.conj().T


def partial_transpose(rho, part: Bipartition) -> np.ndarray:
    rho = as_mixed(rho)
    part.validate(rho.n)
    n = rho.n
    t = rho.matrix.reshape(rho.dims * 2)
    axes = list(range(2 * n))
    for i in part.side_a:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return np.transpose(t, axes).reshape(rho.matrix.shape)


def trace_norm(m) -> float:
    m = as_matrix(m)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def schmidt_coefficients(psi: PureState, part: Bipartition) -> np.ndarray:
    """Squared Schmidt coefficients, descending; length min(d_A, d_B)."""
    s = np.linalg.svd(_permuted_matrix(psi, part), compute_uv=False)
    lam = s**2
    return lam / lam.sum()


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order with matching orthonormal eigenvector columns."""
    m = as_matrix(m)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > SPECTRAL_TOL:
        raise InvariantError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def clip_spectrum(w: np.ndarray) -> np.ndarray:
    if np.any(w < -CLIP_TOL):
        raise InvariantError(f"eigenvalue {w.min()!r} is below -{CLIP_TOL}")
    return np.clip(w, 0.0, None)


def purity(m: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", m, m).real)
