"""Entanglement measures: pure-state concurrence and negativity, trace-norm
negativity, linear entropy, and the convex-roof family.

All functions return unsquared values; callers square at the point of use.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError
from .roof import (
    Decomposition,
    MeasureValue,
    RoofConfig,
    eigen_ensemble,
    hjw_decomposition,
    optimize_roof,
)
from .tensor import (
    CLIP_TOL,
    Bipartition,
    MixedState,
    PureState,
    as_mixed,
    partial_trace,
    partial_transpose,
    purity,
    reduced_pure,
    schmidt_coefficients,
    trace_norm,
)

__all__ = [
    "Decomposition",
    "MeasureValue",
    "RoofConfig",
    "hjw_decomposition",
    "optimize_roof",
    "concurrence_pure",
    "negativity_pure",
    "negativity_mixed",
    "linear_entropy",
    "wootters_concurrence",
    "coa_closed_form",
    "cren",
    "crenoa",
    "concurrence",
    "coa",
    "tangle_three",
    "COA_AGREEMENT",
]

COA_AGREEMENT = 1e-6

_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def concurrence_pure(psi: PureState, part: Bipartition) -> MeasureValue:
    lam = schmidt_coefficients(psi, part)
    return MeasureValue(float(np.sqrt(max(0.0, 2 * (1 - np.sum(lam**2))))), "exact")


def negativity_pure(psi: PureState, part: Bipartition) -> MeasureValue:
    lam = np.clip(schmidt_coefficients(psi, part), 0.0, None)
    return MeasureValue(max(0.0, float(np.sum(np.sqrt(lam)) ** 2 - 1)), "exact")


def negativity_mixed(rho, part: Bipartition) -> MeasureValue:
    """Trace norm of the partial transpose, minus one."""
    val = trace_norm(partial_transpose(rho, part)) - 1
    if val < -CLIP_TOL:
        raise InputError(f"trace norm below one by {-val!r}")
    return MeasureValue(max(0.0, val), "exact")


def linear_entropy(rho) -> float:
    return 1.0 - purity(as_mixed(rho).matrix)


def _two_qubit(rho) -> MixedState:
    rho = as_mixed(rho)
    if rho.dims != (2, 2):
        raise InputError(f"expected a two-qubit state, got dims {rho.dims}")
    return rho


def _spin_flip_spectrum(rho: MixedState) -> np.ndarray:
    # Singular values of W^T YY W for rho = W W^dagger equal the square roots of
    # the eigenvalues of rho * YY rho^* YY, without square-rooting round-off.
    w = eigen_ensemble(rho).T
    tau = w.T @ _YY @ w
    lam = np.zeros(4)
    s = np.linalg.svd(tau, compute_uv=False)
    lam[: s.size] = s
    return np.sort(lam)[::-1]


def wootters_concurrence(rho) -> MeasureValue:
    lam = _spin_flip_spectrum(_two_qubit(rho))
    return MeasureValue(max(0.0, float(lam[0] - lam[1:].sum())), "exact")


def coa_closed_form(rho) -> MeasureValue:
    return MeasureValue(float(_spin_flip_spectrum(_two_qubit(rho)).sum()), "exact")


def _qubit_pair(rho: MixedState, part: Bipartition) -> bool:
    return rho.dims == (2, 2) and len(part.side_a) == 1 and len(part.side_b) == 1


def _pure_shortcut(rho: MixedState) -> PureState | None:
    basis = eigen_ensemble(rho)
    if basis.shape[0] != 1:
        return None
    return PureState(rho.dims, basis[0] / np.linalg.norm(basis[0]))


def cren(rho, part: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Min-roof of pure negativity; two-qubit inputs use the Wootters formula."""
    rho = as_mixed(rho)
    part.validate(rho.n)
    if _qubit_pair(rho, part):
        return wootters_concurrence(rho)
    return optimize_roof(rho, part, "negativity", "min", cfg)


def crenoa(rho, part: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Max-roof of pure negativity.

    For two qubits the optimizer is run against the closed-form assistance
    value; agreement within COA_AGREEMENT promotes the closed form to an exact
    result, otherwise the optimizer's lower bound is returned. With
    ``cfg.cross_check`` off the closed form is trusted directly.
    """
    rho = as_mixed(rho)
    part.validate(rho.n)
    psi = _pure_shortcut(rho)
    if psi is not None:
        return negativity_pure(psi, part)
    if not _qubit_pair(rho, part):
        return optimize_roof(rho, part, "negativity", "max", cfg)
    closed = coa_closed_form(rho)
    if not cfg.cross_check:
        return closed
    found = optimize_roof(rho, part, "negativity", "max", cfg)
    if abs(found.value - closed.value) <= COA_AGREEMENT:
        return MeasureValue(closed.value, "exact", found.witness, found.evaluations)
    return found


def concurrence(rho, part: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Concurrence of any state: pure formula, Wootters, or the min-roof optimizer."""
    rho_m = as_mixed(rho)
    part.validate(rho_m.n)
    psi = rho if isinstance(rho, PureState) else _pure_shortcut(rho_m)
    if psi is not None:
        return concurrence_pure(psi, part)
    if _qubit_pair(rho_m, part):
        return wootters_concurrence(rho_m)
    return optimize_roof(rho_m, part, "concurrence", "min", cfg)


def coa(rho, part: Bipartition, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """Concurrence of assistance: pure formula, closed form, or max-roof optimizer."""
    rho_m = as_mixed(rho)
    part.validate(rho_m.n)
    psi = rho if isinstance(rho, PureState) else _pure_shortcut(rho_m)
    if psi is not None:
        return concurrence_pure(psi, part)
    if _qubit_pair(rho_m, part):
        return coa_closed_form(rho_m)
    return optimize_roof(rho_m, part, "concurrence", "max", cfg)


def tangle_three(psi: PureState, cfg: RoofConfig = RoofConfig()) -> MeasureValue:
    """C^2(A|BC) - C^2(rho_AB) - C^2(rho_AC) for a 2 x 2 x m pure state.

    When C has more than two levels the AC concurrence comes from the min-roof
    optimizer (an upper bound), which makes the tangle a lower bound.
    """
    if psi.n != 3 or psi.dims[0] != 2 or psi.dims[1] != 2:
        raise InputError(f"tangle needs dims (2, 2, m), got {psi.dims}")
    whole = concurrence_pure(psi, Bipartition((0,), (1, 2))).squared
    pair = Bipartition((0,), (1,))
    ab = wootters_concurrence(MixedState((2, 2), reduced_pure(psi, (0, 1)))).squared
    ac = concurrence(partial_trace(psi, (0, 2)), pair, cfg)
    bound = "exact" if ac.bound == "exact" else "lower"
    val = whole - ab - ac.squared
    if abs(val) < 1e-12:
        val = 0.0
    return MeasureValue(val, bound, None, ac.evaluations)
