"""Entanglement measures, convex-roof optimization and monogamy checks."""
from .errors import InputError, InvariantError
from .measures import (
    MeasureValue,
    RoofConfig,
    coa,
    coa_closed_form,
    concurrence,
    concurrence_pure,
    cren,
    crenoa,
    negativity_mixed,
    negativity_pure,
    wootters_concurrence,
)
from .monogamy import InequalityReport, run_check
from .suite import closed_form_suite
from .tensor import Bipartition, MixedState, PureState

__all__ = [
    "InputError", "InvariantError", "MeasureValue", "RoofConfig", "coa", "coa_closed_form",
    "concurrence", "concurrence_pure", "cren", "crenoa", "negativity_mixed", "negativity_pure",
    "wootters_concurrence", "InequalityReport", "run_check", "closed_form_suite",
    "Bipartition", "MixedState", "PureState",
]
