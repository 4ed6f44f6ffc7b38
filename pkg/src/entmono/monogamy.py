"""Monogamy and polygamy inequalities evaluated on concrete states.

Each checker returns an :class:`InequalityReport` whose verdict accounts for
the bound direction of every term. A max-roof found by search is only a
lower bound, a min-roof only an upper bound, so an inequality is *verified*
only when the side that must be smaller is bounded from above and the side
that must be larger is bounded from below. The reverse certification gives
*violated*. Point estimates that satisfy the inequality without such a
certificate are *consistent*; anything else is *inconclusive*.

Parties A and B of the two-party theorems are subsystems 0 and 1; permute
the state first to test another pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import InputError
from .measures import (
    MeasureValue,
    RoofConfig,
    coa,
    concurrence,
    concurrence_pure,
    cren,
    crenoa,
    linear_entropy,
    negativity_pure,
    wootters_concurrence,
)
from .roof import eigen_ensemble
from .tensor import Bipartition, MixedState, PureState, as_mixed, partial_trace

Verdict = Literal["verified", "consistent", "violated", "inconclusive"]
EXACT_TOL = 1e-6
SEARCH_TOL = 1e-3


@dataclass(frozen=True)
class Term:
    label: str
    value: MeasureValue
    coeff: float = 1.0
    squared: bool = True

    @property
    def contribution(self) -> float:
        v = self.value.value
        return self.coeff * (v * v if self.squared else v)

    @property
    def bound(self) -> str:
        b = self.value.bound
        if self.coeff < 0 and b != "exact":
            return "upper" if b == "lower" else "lower"
        return b


def _side_bound(terms: Sequence[Term], absolute: bool) -> str:
    bounds = {t.bound for t in terms}
    if bounds <= {"exact"}:
        return "exact"
    if absolute:
        return "none"
    if bounds <= {"exact", "upper"}:
        return "upper"
    if bounds <= {"exact", "lower"}:
        return "lower"
    return "none"


@dataclass
class InequalityReport:
    name: str
    relation: Literal["<=", ">=", "=="]
    lhs_terms: list[Term]
    rhs_terms: list[Term]
    lhs: float
    rhs: float
    lhs_bound: str
    rhs_bound: str
    slack: float
    verdict: Verdict
    tolerance: float
    notes: list[str] = field(default_factory=list)

    @property
    def terms(self) -> list[Term]:
        return self.lhs_terms + self.rhs_terms

    @property
    def holds(self) -> bool:
        return self.verdict in ("verified", "consistent")


def _verdict(small_bound: str, large_bound: str, slack: float, tol: float) -> Verdict:
    if slack >= -tol:
        if small_bound in ("exact", "upper") and large_bound in ("exact", "lower"):
            return "verified"
        return "consistent"
    if small_bound in ("exact", "lower") and large_bound in ("exact", "upper"):
        return "violated"
    return "inconclusive"


def build_report(
    name: str,
    relation: str,
    lhs_terms: list[Term],
    rhs_terms: list[Term],
    *,
    lhs_abs: bool = False,
    rhs_abs: bool = False,
    tolerance: Optional[float] = None,
) -> InequalityReport:
    lhs = sum(t.contribution for t in lhs_terms)
    rhs = sum(t.contribution for t in rhs_terms)
    lhs = abs(lhs) if lhs_abs else lhs
    rhs = abs(rhs) if rhs_abs else rhs
    lb, rb = _side_bound(lhs_terms, lhs_abs), _side_bound(rhs_terms, rhs_abs)
    if tolerance is None:
        exact = all(t.value.bound == "exact" for t in lhs_terms + rhs_terms)
        tolerance = EXACT_TOL if exact else SEARCH_TOL
    if relation == "<=":
        slack = rhs - lhs
        verdict = _verdict(lb, rb, slack, tolerance)
    elif relation == ">=":
        slack = lhs - rhs
        verdict = _verdict(rb, lb, slack, tolerance)
    elif relation == "==":
        slack = rhs - lhs
        exact = lb == "exact" and rb == "exact"
        if abs(slack) <= tolerance:
            verdict = "verified" if exact else "consistent"
        else:
            verdict = "violated" if exact else "inconclusive"
    else:
        raise InputError(f"unknown relation {relation!r}")
    return InequalityReport(name, relation, lhs_terms, rhs_terms, lhs, rhs, lb, rb,
                            slack, verdict, tolerance)


# -- term helpers -------------------------------------------------------------


@lru_cache(maxsize=8192)
def _roof_cached(kind: str, dims: tuple, raw: bytes, side_a: tuple, side_b: tuple,
                 cfg: RoofConfig) -> MeasureValue:
    n = int(np.prod(dims))
    rho = MixedState(dims, np.frombuffer(raw, dtype=complex).reshape(n, n))
    fn = {"crenoa": crenoa, "cren": cren, "concurrence": concurrence, "coa": coa}[kind]
    return fn(rho, Bipartition(side_a, side_b), cfg)


def _roof(kind: str, rho: MixedState, part: Bipartition, cfg: RoofConfig) -> MeasureValue:
    raw = np.ascontiguousarray(rho.matrix).tobytes()
    return _roof_cached(kind, rho.dims, raw, part.side_a, part.side_b, cfg)


_PAIR = Bipartition((0,), (1,))


def pair_value(state, i: int, j: int, kind: str, cfg: RoofConfig) -> MeasureValue:
    """Roof `kind` of the two-party marginal on subsystems i and j."""
    rho = partial_trace(state, (i, j))
    if kind == "wootters":
        return wootters_concurrence(rho)
    return _roof(kind, rho, _PAIR, cfg)


def cut_value(state, side_a: Sequence[int], kind: str, cfg: RoofConfig) -> MeasureValue:
    """Entanglement of `state` across side_a | rest."""
    n = len(state.dims)
    part = Bipartition.split(n, side_a)
    if isinstance(state, PureState):
        if kind in ("negativity", "crenoa", "cren"):
            return negativity_pure(state, part)
        return concurrence_pure(state, part)
    return _roof(kind, state, part, cfg)


def _as_pure(state) -> PureState:
    if isinstance(state, PureState):
        return state
    rho = as_mixed(state)
    basis = eigen_ensemble(rho)
    if basis.shape[0] != 1:
        raise InputError("this check needs a pure state")
    return PureState(rho.dims, basis[0] / np.linalg.norm(basis[0]))


def _require(state, *, qubits: bool = False, min_n: int = 3, exact_n: Optional[int] = None):
    n = len(state.dims)
    if exact_n is not None and n != exact_n:
        raise InputError(f"expected {exact_n} subsystems, got {n}")
    if n < min_n:
        raise InputError(f"expected at least {min_n} subsystems, got {n}")
    if qubits and any(d != 2 for d in state.dims):
        raise InputError(f"expected qubits only, got dims {state.dims}")


def _label(sym: str, *parties) -> str:
    return f"{sym}({','.join(map(str, parties))})"


# -- pairwise CKW family -------------------------------------------------------


def _first_party_check(name, psi, relation, cut_kind, pair_kind, cut_sym, pair_sym, cfg):
    psi = _as_pure(psi)
    _require(psi, qubits=True)
    n = psi.n
    lhs = [Term(_label(cut_sym, "0|rest"), cut_value(psi, (0,), cut_kind, cfg))]
    rhs = [Term(_label(pair_sym, 0, j), pair_value(psi, 0, j, pair_kind, cfg)) for j in range(1, n)]
    return build_report(name, relation, lhs, rhs)


def ckw_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """C^2(A1|rest) >= sum_j C^2(rho_A1Aj)."""
    return _first_party_check("ckw", psi, ">=", "concurrence", "wootters", "C^2", "C^2", cfg)


def coa_dual_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """C^2(A1|rest) <= sum_j Ca^2(rho_A1Aj)."""
    return _first_party_check("coa-dual", psi, "<=", "concurrence", "coa", "C^2", "Ca^2", cfg)


def cren_monogamy_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """N^2(A1|rest) >= sum_j Nc^2(rho_A1Aj)."""
    return _first_party_check("cren", psi, ">=", "negativity", "cren", "N^2", "Nc^2", cfg)


def crenoa_dual_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """N^2(A1|rest) <= sum_j Na^2(rho_A1Aj)."""
    return _first_party_check("crenoa-dual", psi, "<=", "negativity", "crenoa", "N^2", "Na^2", cfg)


# -- assisted-negativity theorems ----------------------------------------------


def theorem1_check(rho, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """Na^2(A|BC) <= Na^2(B|AC) + Na^2(C|AB) for a three-party state.

    The qubit case is the theorem proper; qudit inputs are accepted so the
    antisymmetric qutrit example can be run through the same path.
    """
    _require(rho, exact_n=3)
    terms = [Term(_label("Na^2", f"{k}|rest"), cut_value(rho, (k,), "crenoa", cfg)) for k in range(3)]
    return build_report("theorem1", "<=", terms[:1], terms[1:])


def corollary1_check(rho, cfg: RoofConfig = RoofConfig()) -> list[InequalityReport]:
    """Both stages of the n-qubit chain:

    Na^2(A1|rest) <= sum_{i>=2} Na^2(Ai|rest) <= sum_{i>=2} sum_{j!=i} Na^2(rho_AiAj)
    """
    _require(rho, qubits=True, min_n=2)
    n = len(rho.dims)
    cuts = [Term(_label("Na^2", f"{i}|rest"), cut_value(rho, (i,), "crenoa", cfg)) for i in range(n)]
    pairs = {}
    for i in range(1, n):
        for j in range(n):
            if j != i:
                key = (min(i, j), max(i, j))
                if key not in pairs:
                    pairs[key] = pair_value(rho, *key, "crenoa", cfg)
    pair_terms = [Term(_label("Na^2", i, j), pairs[(min(i, j), max(i, j))])
                  for i in range(1, n) for j in range(n) if j != i]
    first = build_report("corollary1-stage1", "<=", cuts[:1], cuts[1:])
    second = build_report("corollary1-stage2", "<=", cuts[1:], pair_terms)
    return [first, second]


def _two_party_terms(psi: PureState, cfg: RoofConfig):
    n = psi.n
    ab = pair_value(psi, 0, 1, "crenoa", cfg)
    ac = [Term(_label("Na^2", 0, c), pair_value(psi, 0, c, "crenoa", cfg)) for c in range(2, n)]
    bc = [Term(_label("Na^2", 1, c), pair_value(psi, 1, c, "crenoa", cfg)) for c in range(2, n)]
    cut = Term("N^2(0,1|rest)", negativity_pure(psi, Bipartition.split(n, (0, 1))))
    return ab, ac, bc, cut


def theorem2_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """2 Na^2(rho_AB) + sum_i Na^2(rho_ACi) + sum_i Na^2(rho_BCi) >= N^2(AB|C1..C(n-2))."""
    psi = _as_pure(psi)
    _require(psi)
    ab, ac, bc, cut = _two_party_terms(psi, cfg)
    lhs = [Term(_label("Na^2", 0, 1), ab, coeff=2.0)] + ac + bc
    return build_report("theorem2", ">=", lhs, [cut])


def theorem3_check(psi, cfg: RoofConfig = RoofConfig()) -> InequalityReport:
    """N^2(AB|C1..C(n-2)) >= |sum_i Na^2(rho_ACi) - sum_i Na^2(rho_BCi)|."""
    psi = _as_pure(psi)
    _require(psi)
    _, ac, bc, cut = _two_party_terms(psi, cfg)
    rhs = ac + [Term(t.label, t.value, coeff=-1.0) for t in bc]
    return build_report("theorem3", ">=", [cut], rhs, rhs_abs=True)


# -- identities and entropy ------------------------------------------------------


def decomposition_identity_check(psi, cfg: RoofConfig = RoofConfig()) -> list[InequalityReport]:
    """Residuals of C^2(A|B rest) = Ca^2(rho_AB) + C^2(rho_A|rest) and its negativity twin.

    With a single remaining qubit every term is closed-form; larger remainders
    need the min-roof optimizer for rho_A|rest.
    """
    psi = _as_pure(psi)
    _require(psi)
    if psi.dims[0] != 2 or psi.dims[1] != 2:
        raise InputError(f"parties A and B must be qubits, got dims {psi.dims}")
    n = psi.n
    rest_state = partial_trace(psi, [0] + list(range(2, n)))
    rest_part = Bipartition((0,), tuple(range(1, n - 1)))
    ab = partial_trace(psi, (0, 1))
    reports = []
    for name, cut_kind, assist, roof_kind, syms in (
        ("concurrence-identity", "concurrence", "coa", "concurrence", ("C^2", "Ca^2", "C^2")),
        ("negativity-identity", "negativity", "crenoa", "cren", ("N^2", "Na^2", "Nc^2")),
    ):
        lhs = [Term(_label(syms[0], "0|rest"), cut_value(psi, (0,), cut_kind, cfg))]
        rhs = [
            Term(_label(syms[1], 0, 1), _roof(assist, ab, _PAIR, cfg)),
            Term(_label(syms[2], "0|" + ",".join(map(str, range(2, n)))),
                 _roof(roof_kind, rest_state, rest_part, cfg)),
        ]
        reports.append(build_report(name, "==", lhs, rhs))
    return reports


def entropy_subadditivity_check(rho, part: Bipartition) -> list[InequalityReport]:
    """T(rho_A) + T(rho_B) >= T(rho_AB) >= |T(rho_A) - T(rho_B)| with T = 1 - Tr rho^2."""
    rho = as_mixed(rho)
    part.validate(rho.n)
    t_ab = MeasureValue(linear_entropy(rho))
    t_a = MeasureValue(linear_entropy(partial_trace(rho, part.side_a)))
    t_b = MeasureValue(linear_entropy(partial_trace(rho, part.side_b)))
    ta, tb, tab = (Term(f"T({s})", v, squared=False) for s, v in (("A", t_a), ("B", t_b), ("AB", t_ab)))
    upper = build_report("entropy-subadditivity", ">=", [ta, tb], [tab], tolerance=1e-9)
    lower = build_report("entropy-triangle", ">=", [tab],
                         [ta, Term(tb.label, t_b, coeff=-1.0, squared=False)],
                         rhs_abs=True, tolerance=1e-9)
    return [upper, lower]


CHECKS = {
    "ckw": ckw_check,
    "coa-dual": coa_dual_check,
    "cren": cren_monogamy_check,
    "crenoa-dual": crenoa_dual_check,
    "theorem1": theorem1_check,
    "corollary1": corollary1_check,
    "theorem2": theorem2_check,
    "theorem3": theorem3_check,
    "identity": decomposition_identity_check,
}


def run_check(name: str, state, cfg: RoofConfig = RoofConfig(),
              part: Optional[Bipartition] = None) -> list[InequalityReport]:
    """Dispatch by name; always returns a list of reports."""
    if name == "entropy":
        if part is None:
            part = Bipartition((0,), tuple(range(1, len(state.dims))))
        return entropy_subadditivity_check(state, part)
    if name not in CHECKS:
        raise InputError(f"unknown inequality {name!r}")
    out = CHECKS[name](state, cfg)
    return out if isinstance(out, list) else [out]


def worst_verdict(reports: Sequence[InequalityReport]) -> Verdict:
    order = ["verified", "consistent", "inconclusive", "violated"]
    return max((r.verdict for r in reports), key=order.index, default="verified")
