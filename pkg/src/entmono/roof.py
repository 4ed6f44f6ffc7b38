"""Convex-roof optimization over pure-state decompositions.

Every decomposition of a rank-r state rho into m members comes from an
m x r isometry V acting on the subnormalized eigen-ensemble of rho. The
optimizer searches that Stiefel manifold: each restart starts at a random
isometry and climbs with momentum-carrying Riemannian gradient steps under
a polar retraction. Two rejected steps in a row trigger one random tangent
proposal. Step sizes grow on success and halve on failure.

Any decomposition bounds a min-roof from above and a max-roof from below,
so the reported value carries that direction. Restarts run in fixed blocks
whose composition depends only on the restart count; each restart owns
an RNG seeded from (seed, restart index). The result is therefore
identical for any thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import prod
from typing import Callable, Literal, Optional

import numpy as np

from .errors import InputError, InvariantError
from .tensor import (
    SPECTRAL_TOL,
    Bipartition,
    MixedState,
    PureState,
    as_matrix,
    as_mixed,
    hermitian_eig,
    schmidt_coefficients,
)

Bound = Literal["exact", "lower", "upper"]
RANK_TOL = 1e-11
BLOCK = 16
STALL_LIMIT = 50
MAX_STEP = 1.0
MIN_STEP = 1e-12
MOMENTUM = 0.8


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Weighted pure-state ensemble; `vectors` holds one normalized member per row."""

    dims: tuple[int, ...]
    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        if w.ndim != 1 or v.shape != (w.size, prod(self.dims)):
            raise InputError("weights and member vectors have inconsistent shapes")
        if np.any(w <= 0):
            raise InvariantError("decomposition weights must be positive")
        if abs(w.sum() - 1) > 1e-10:
            raise InvariantError(f"decomposition weights sum to {w.sum()!r}")
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def members(self) -> list[PureState]:
        return [PureState(self.dims, row / np.linalg.norm(row)) for row in self.vectors]

    def matrix(self) -> np.ndarray:
        v = self.vectors * np.sqrt(self.weights)[:, None]
        return v.T @ v.conj()

    def residual(self, rho) -> float:
        return float(np.max(np.abs(self.matrix() - as_mixed(rho).matrix)))

    def average(self, fn: Callable[[PureState], float]) -> float:
        return float(sum(p * fn(psi) for p, psi in zip(self.weights, self.members)))

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class MeasureValue:
    value: float
    bound: Bound = "exact"
    witness: Optional[Decomposition] = field(default=None, compare=False, repr=False)
    evaluations: int = 0

    @property
    def squared(self) -> float:
        return self.value**2


@dataclass(frozen=True)
class RoofConfig:
    restarts: int = 64
    iterations: int = 500
    ensemble_size: Optional[int] = None
    tolerance: float = 1e-7
    seed: int = 0
    threads: int = 1
    # two-qubit max-roofs also run the optimizer against the closed form
    cross_check: bool = True

    def __post_init__(self):
        if self.restarts < 1 or self.iterations < 1:
            raise InputError("restarts and iterations must be positive")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise InputError("ensemble_size must be positive")
        if self.threads < 1:
            raise InputError("threads must be positive")

    def members_for(self, rank: int) -> int:
        if self.ensemble_size is None:
            return min(2 * rank, rank * rank)
        if self.ensemble_size < rank:
            raise InputError(f"ensemble size {self.ensemble_size} is below the state rank {rank}")
        return self.ensemble_size


def eigen_ensemble(rho: MixedState) -> np.ndarray:
    """Rows are the subnormalized eigenvectors sqrt(mu_l) e_l with mu_l > RANK_TOL."""
    w, v = hermitian_eig(rho.matrix)
    keep = w > RANK_TOL
    return (v[:, keep] * np.sqrt(w[keep])).T


def hjw_decomposition(rho, isometry) -> Decomposition:
    rho = as_mixed(rho)
    b = eigen_ensemble(rho)
    iso = as_matrix(isometry, square=False)
    if iso.shape[1] != b.shape[0]:
        raise InputError(f"isometry needs {b.shape[0]} columns, has {iso.shape[1]}")
    if np.max(np.abs(iso.conj().T @ iso - np.eye(iso.shape[1]))) > SPECTRAL_TOL:
        raise InputError("isometry columns are not orthonormal")
    return _decomposition_from(rho.dims, iso @ b)


def _decomposition_from(dims, sub: np.ndarray) -> Decomposition:
    p = np.sum(np.abs(sub) ** 2, axis=1)
    keep = p > 1e-15
    p, sub = p[keep], sub[keep]
    return Decomposition(dims, p / p.sum(), sub / np.sqrt(p)[:, None])


# Pure-state measures scaled by member weight, written in singular values s
# of the reshaped subnormalized member: p*N = (sum s)^2 - sum s^2 and
# p*C = sqrt(2 (p^2 - sum s^4)) with p = sum s^2. With a qubit on either side
# both reduce to 2 s_1 s_2, so neither needs an SVD there.


def _weighted_values(s: np.ndarray, measure: str) -> np.ndarray:
    if measure == "negativity":
        return s.sum(-1) ** 2 - (s**2).sum(-1)
    p = (s**2).sum(-1)
    return np.sqrt(np.clip(2 * (p**2 - (s**4).sum(-1)), 0.0, None))


def _dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a.conj(), -1, -2)


def _gram_grad(mats: np.ndarray):
    gram = mats @ _dagger(mats)
    p = np.einsum("...ii->...", gram).real
    vals = np.sqrt(np.clip(2 * (p**2 - np.sum(np.abs(gram) ** 2, axis=(-2, -1))), 0.0, None))
    live = vals > 1e-12
    scale = np.where(live, 4 / np.where(live, vals, 1.0), 0.0)
    g = scale[..., None, None] * (p[..., None, None] * mats - gram @ mats)
    return vals, g


def _nuclear_grad(mats: np.ndarray):
    u, s, vh = np.linalg.svd(mats, full_matrices=False)
    nuc = s.sum(-1)
    return _weighted_values(s, "negativity"), 2 * nuc[..., None, None] * (u @ vh) - 2 * mats


def _polar(x: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def _retract(x: np.ndarray) -> np.ndarray:
    """Polar factor of V + t Z for a tangent Z; the Gram spectrum lies in [1, 1 + t^2]."""
    eye = np.eye(x.shape[-1])
    gram = _dagger(x) @ x
    scale = 1.0 + np.linalg.norm(gram - eye, axis=(-2, -1))[..., None, None]
    y, z = gram / scale, np.broadcast_to(eye, gram.shape)
    # coupled Newton-Schulz: z -> (gram / scale)^(-1/2)
    for _ in range(6):
        t = 1.5 * eye - 0.5 * (z @ y)
        y, z = y @ t, t @ z
    return x @ z / np.sqrt(scale)


def _herm(a: np.ndarray) -> np.ndarray:
    return (a + _dagger(a)) / 2


class _Problem:
    def __init__(self, basis: np.ndarray, da: int, db: int, m: int, measure: str, sign: float):
        self.basis = basis  # r x (da*db), columns already grouped side_a then side_b
        self.basis_h = basis.conj().T
        self.da, self.db, self.m = da, db, m
        self.measure = measure
        self.sign = sign

    def evaluate(self, v: np.ndarray):
        """Objective and Riemannian gradient for a stack of isometries (R, m, r)."""
        sub = v @ self.basis
        mats = sub.reshape(v.shape[0], self.m, self.da, self.db)
        if self.measure == "concurrence" or min(self.da, self.db) == 2:
            vals, g = _gram_grad(mats)
        else:
            vals, g = _nuclear_grad(mats)
        gv = g.reshape(sub.shape) @ self.basis_h
        riem = gv - v @ _herm(_dagger(v) @ gv)
        return vals.sum(-1), riem


def _random_tangent(rng: np.random.Generator, v: np.ndarray) -> np.ndarray:
    z = rng.standard_normal(v.shape + (2,)).view(complex)[..., 0]
    z = z - v @ _herm(v.conj().T @ z)
    return z / max(np.linalg.norm(z), 1e-300)


def _run_block(problem: _Problem, rank: int, seed: int, indices: range, cfg: RoofConfig):
    sign = problem.sign
    rngs = [np.random.default_rng([seed, k]) for k in indices]
    shape = (problem.m, rank)
    v = np.stack([_polar(r.standard_normal(shape + (2,)).view(complex)[..., 0]) for r in rngs])
    f, grad = problem.evaluate(v)
    count = len(indices)
    evals = np.ones(count, dtype=np.int64)
    step = np.full(count, 0.1)
    stall = np.zeros(count, dtype=np.int64)
    fails = np.zeros(count, dtype=np.int64)
    active = np.ones(count, dtype=bool)
    momentum = np.zeros_like(v)

    for _ in range(cfg.iterations):
        if not active.any():
            break
        gnorm = np.linalg.norm(grad, axis=(1, 2))
        ascent = sign * grad / np.maximum(gnorm, 1e-300)[:, None, None]
        carried = momentum - v @ _herm(_dagger(v) @ momentum)
        direction = ascent + MOMENTUM * carried
        direction /= np.maximum(np.linalg.norm(direction, axis=(1, 2)), 1e-300)[:, None, None]
        explore = active & ((fails >= 2) | (gnorm < 1e-14))
        for k in np.flatnonzero(explore):
            direction[k] = _random_tangent(rngs[k], v[k])
        trial = _retract(v + step[:, None, None] * direction)
        f_try, grad_try = problem.evaluate(trial)
        evals += active
        gain = sign * (f_try - f)
        accept = active & (gain > 0)
        keep = accept[:, None, None]
        v = np.where(keep, trial, v)
        f = np.where(accept, f_try, f)
        grad = np.where(keep, grad_try, grad)
        momentum = np.where(keep & ~explore[:, None, None], direction, 0.0)
        fails = np.where(accept | explore, 0, fails + 1)
        step = np.where(accept, np.minimum(step * 1.5, MAX_STEP), step * 0.5)
        stall = np.where(accept & (gain >= cfg.tolerance), 0, stall + 1)
        active &= (stall < STALL_LIMIT) & (step > MIN_STEP)

    return [(float(f[k]), v[k], int(evals[k])) for k in range(count)]


def _pure_value(psi: PureState, part: Bipartition, measure: str) -> float:
    lam = np.clip(schmidt_coefficients(psi, part), 0.0, None)
    return float(_weighted_values(np.sqrt(lam), measure))


def optimize_roof(
    rho,
    part: Bipartition,
    measure: Literal["concurrence", "negativity"],
    objective: Literal["min", "max"],
    cfg: RoofConfig = RoofConfig(),
) -> MeasureValue:
    """Best average of `measure` over decompositions of rho found by multi-restart search."""
    if measure not in ("concurrence", "negativity"):
        raise InputError(f"unknown roof measure {measure!r}")
    if objective not in ("min", "max"):
        raise InputError(f"objective must be 'min' or 'max', got {objective!r}")
    rho = as_mixed(rho)
    part.validate(rho.n)
    basis = eigen_ensemble(rho)
    rank = basis.shape[0]
    m = cfg.members_for(rank)

    if rank == 1:
        psi = PureState(rho.dims, basis[0] / np.linalg.norm(basis[0]))
        wit = Decomposition(rho.dims, np.ones(1), psi.amplitudes[None, :])
        return MeasureValue(_pure_value(psi, part, measure), "exact", wit, 1)

    order = part.side_a + part.side_b
    grouped = np.transpose(basis.reshape((rank,) + rho.dims), (0,) + tuple(i + 1 for i in order))
    da = prod(rho.dims[i] for i in part.side_a)
    problem = _Problem(grouped.reshape(rank, -1), da, grouped[0].size // da, m, measure,
                       1.0 if objective == "max" else -1.0)

    blocks = [range(s, min(s + BLOCK, cfg.restarts)) for s in range(0, cfg.restarts, BLOCK)]
    if cfg.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda idx: _run_block(problem, rank, cfg.seed, idx, cfg), blocks))
    else:
        results = [_run_block(problem, rank, cfg.seed, idx, cfg) for idx in blocks]

    best_val, best_v, total = None, None, 0
    for block in results:
        for val, v, n_eval in block:
            total += n_eval
            if best_val is None or problem.sign * (val - best_val) > 0:
                best_val, best_v = val, v
    witness = _decomposition_from(rho.dims, best_v @ basis)
    bound: Bound = "lower" if objective == "max" else "upper"
    return MeasureValue(max(best_val, 0.0), bound, witness, total)
