from .checks import (
    DEFAULT_ERRORS,
    DEFAULT_FLAGS,
    constant_within_landing_error,
    kinetic_energy_flag,
    non_finite_error,
)
from .models import (
    CheckLogSchema,
    CheckResult,
    ErrorCheck,
    ErrorList,
    FlagCheck,
    FlagList,
)
from .runner import run_checks

__all__ = [
    "DEFAULT_ERRORS",
    "DEFAULT_FLAGS",
    "CheckLogSchema",
    "CheckResult",
    "ErrorCheck",
    "ErrorList",
    "FlagCheck",
    "FlagList",
    "constant_within_landing_error",
    "kinetic_energy_flag",
    "non_finite_error",
    "run_checks",
]
