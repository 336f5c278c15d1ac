from .dataset import (
    DatasetSchemaError,
    FlightDatabase,
    FoldPlan,
    GeneratorConfig,
    Landing,
    generate_synthetic,
    split_folds,
)
from .evaluation import (
    AnomalyScore,
    EvalReport,
    aggregate_mape,
    anomaly_score,
    cross_validate,
    emit_report,
    error_histogram,
    load_report,
    mape_blocks,
    profile_error,
)
from .gp import (
    GpModel,
    Hyperparameters,
    OptimizerConfig,
    TimeWeight,
    block_scheme,
    fit_model,
    posterior,
    predict_profile,
)
from .io import database_digest, load_csv, save_csv
from .regressors import (
    ForestConfig,
    GaussianProcessRegressor,
    LinearRegressor,
    RandomForestRegressor,
    Regressor,
)

__all__ = [
    "AnomalyScore",
    "DatasetSchemaError",
    "EvalReport",
    "FlightDatabase",
    "FoldPlan",
    "ForestConfig",
    "GaussianProcessRegressor",
    "GeneratorConfig",
    "GpModel",
    "Hyperparameters",
    "Landing",
    "LinearRegressor",
    "OptimizerConfig",
    "RandomForestRegressor",
    "Regressor",
    "TimeWeight",
    "aggregate_mape",
    "anomaly_score",
    "block_scheme",
    "cross_validate",
    "database_digest",
    "emit_report",
    "error_histogram",
    "fit_model",
    "generate_synthetic",
    "load_csv",
    "load_report",
    "mape_blocks",
    "posterior",
    "predict_profile",
    "profile_error",
    "save_csv",
    "split_folds",
]
