"""Reduced-form implementability for two-player problems with finitely many alternatives."""
from .characterization import (
    check_conic,
    check_cuts,
    check_implementable,
    check_strassen,
    check_symmetric,
    eval_cut,
)
from .core import (
    Conic,
    Cut,
    CutTriple,
    ExPostRule,
    Implementable,
    InequalitiesHold,
    Instance,
    InterimRule,
    Negative,
    NotImplementable,
    check_ex_post_feasible,
    complete_with_slack,
    reduce,
    validate_instance,
)
from .oracle import cross_check, lp_feasible

__all__ = [
    "Conic", "Cut", "CutTriple", "ExPostRule", "Implementable", "InequalitiesHold",
    "Instance", "InterimRule", "Negative", "NotImplementable",
    "check_conic", "check_cuts", "check_ex_post_feasible", "check_implementable",
    "check_strassen", "check_symmetric", "complete_with_slack", "cross_check",
    "eval_cut", "lp_feasible", "reduce", "validate_instance",
]
