"""Conditional Chisini means and certainty equivalents on finite
probability spaces, with state-dependent utilities, preference-axiom
audits and constructive utility extraction/repair."""

from .conditional import (
    ChisiniSolution,
    ConditionabilityResult,
    chisini_mean,
    taking_out,
    uniqueness_check,
    verify_conditionable,
)
from .curves import (
    Curve,
    ExponentialCurve,
    LinearCurve,
    MixtureCurve,
    PiecewiseLinearCurve,
    PowerCurve,
)
from .extended import NEG_INF, POS_INF, ExtendedReal
from .family import (
    ExpectationFamily,
    audit_certainty_equivalent,
    check_fixpoint_on_measurable,
    check_locality,
    check_tower,
)
from .forge import (
    DyadicGrid,
    DyadicGridUtility,
    JumpReport,
    SetFunctionalOracle,
    build_u_plus,
    detect_jumps,
    evaluate_envelope,
    extract_utility,
    repair_continuous,
    validate_grid_regularity,
)
from .audit import (
    PreferenceFunctional,
    Witness,
    check_conditionable_all_events,
    check_conditionable_on_event,
    check_strict_monotonicity,
    check_sure_thing,
    choquet_functional,
    equivalence_harness,
    expected_utility_functional,
    grid_table_functional,
)
from .reports import AuditReport, CheckResult
from .spaces import (
    Act,
    EventSet,
    FiniteSpace,
    PartitionAlgebra,
    conditional_expectation,
    equal_up_to_null,
    is_null_event,
    paste,
    refine,
)
from .utility import (
    AdditiveRepresentation,
    ProjectedUtility,
    StateUtility,
    ValidationReport,
    ensure_regular,
    generalized_inverse,
    image_interval,
    project_utility,
    validate_regular,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "Act",
    "AdditiveRepresentation",
    "AuditReport",
    "CheckResult",
    "ChisiniSolution",
    "ConditionabilityResult",
    "Curve",
    "DyadicGrid",
    "DyadicGridUtility",
    "EventSet",
    "ExpectationFamily",
    "ExponentialCurve",
    "ExtendedReal",
    "FiniteSpace",
    "JumpReport",
    "LinearCurve",
    "MixtureCurve",
    "NEG_INF",
    "POS_INF",
    "PartitionAlgebra",
    "PiecewiseLinearCurve",
    "PowerCurve",
    "PreferenceFunctional",
    "ProjectedUtility",
    "SetFunctionalOracle",
    "StateUtility",
    "ValidationReport",
    "Witness",
    "audit_certainty_equivalent",
    "build_u_plus",
    "check_conditionable_all_events",
    "check_conditionable_on_event",
    "check_fixpoint_on_measurable",
    "check_locality",
    "check_strict_monotonicity",
    "check_sure_thing",
    "check_tower",
    "chisini_mean",
    "choquet_functional",
    "conditional_expectation",
    "detect_jumps",
    "ensure_regular",
    "equal_up_to_null",
    "equivalence_harness",
    "errors",
    "evaluate_envelope",
    "expected_utility_functional",
    "extract_utility",
    "generalized_inverse",
    "grid_table_functional",
    "image_interval",
    "is_null_event",
    "paste",
    "project_utility",
    "refine",
    "repair_continuous",
    "taking_out",
    "uniqueness_check",
    "validate_grid_regularity",
    "validate_regular",
    "verify_conditionable",
]
