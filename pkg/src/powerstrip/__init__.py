"""Peak-power scheduling of malleable energy demands on the unit horizon."""

from .errors import (
    AchievabilityError,
    BoundViolationError,
    CaseMismatchError,
    EmptyInputError,
    InfeasiblePolicyError,
    InstanceTooLargeError,
    ParameterError,
    PowerStripError,
    UnsupportedPolicyError,
)
from .region import (
    Case,
    SlotPlan,
    SystemParams,
    classify,
    decompose,
    good_region,
    is_achievable,
    largest_achievable,
)
from .scheduler import (
    Algorithm,
    Assignment,
    Demand,
    DemandSet,
    Policy,
    ValidationReport,
    Violation,
    schedule_greedy,
    schedule_ideal_proportional,
    schedule_ideal_stack,
    schedule_psp,
    validate_policy,
)
from .profile import (
    BoundCertificate,
    StepFunction,
    certify,
    peak_power,
    power_profile,
    stacked_height,
    theoretical_bounds,
)
from .oracle import (
    Filling,
    FillingReport,
    FillingViolation,
    GridSearchConfig,
    NarrowRect,
    achievable_by_search,
    brute_force_peak,
    build_filling,
    fractional_lower_bound,
    grid_error_budget,
    verify_filling,
)
from .harness import (
    ExperimentCell,
    ExperimentConfig,
    ExperimentResult,
    generate_demands,
    run_experiment,
)
from .serialize import emit

__version__ = "0.1.0"

__all__ = [
    "AchievabilityError",
    "Algorithm",
    "Assignment",
    "BoundCertificate",
    "BoundViolationError",
    "Case",
    "CaseMismatchError",
    "Demand",
    "DemandSet",
    "EmptyInputError",
    "ExperimentCell",
    "ExperimentConfig",
    "ExperimentResult",
    "Filling",
    "FillingReport",
    "FillingViolation",
    "GridSearchConfig",
    "InfeasiblePolicyError",
    "InstanceTooLargeError",
    "NarrowRect",
    "ParameterError",
    "Policy",
    "PowerStripError",
    "SlotPlan",
    "StepFunction",
    "SystemParams",
    "UnsupportedPolicyError",
    "ValidationReport",
    "Violation",
    "achievable_by_search",
    "brute_force_peak",
    "build_filling",
    "certify",
    "classify",
    "decompose",
    "emit",
    "fractional_lower_bound",
    "generate_demands",
    "good_region",
    "grid_error_budget",
    "is_achievable",
    "largest_achievable",
    "peak_power",
    "power_profile",
    "run_experiment",
    "schedule_greedy",
    "schedule_ideal_proportional",
    "schedule_ideal_stack",
    "schedule_psp",
    "stacked_height",
    "theoretical_bounds",
    "validate_policy",
    "verify_filling",
]
