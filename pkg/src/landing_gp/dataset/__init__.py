from .folds import FoldCapacityError, fold_plan_digest, split_folds
from .generator import BrakeProfile, GeneratorConfig, ThrottleProfile, generate_synthetic
from .models import DatasetSchemaError, FlightDatabase, FoldPlan, Landing

__all__ = [
    "BrakeProfile",
    "DatasetSchemaError",
    "FlightDatabase",
    "FoldCapacityError",
    "FoldPlan",
    "GeneratorConfig",
    "Landing",
    "ThrottleProfile",
    "fold_plan_digest",
    "generate_synthetic",
    "split_folds",
]
