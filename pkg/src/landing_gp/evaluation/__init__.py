from .anomaly import AnomalyScore, anomaly_score, score_landings
from .crossval import DEFAULT_EVAL_RANGE, EvalReport, FoldError, FoldSummary, LandingResult, cross_validate
from .metrics import (
    BlockErrors,
    Histogram,
    ZeroNormError,
    aggregate_mape,
    error_histogram,
    mape_blocks,
    median_error,
    profile_error,
    resolve_range,
)
from .report import ReportFormat, emit_report, load_report

__all__ = [
    "DEFAULT_EVAL_RANGE",
    "AnomalyScore",
    "BlockErrors",
    "EvalReport",
    "FoldError",
    "FoldSummary",
    "Histogram",
    "LandingResult",
    "ReportFormat",
    "ZeroNormError",
    "aggregate_mape",
    "anomaly_score",
    "cross_validate",
    "emit_report",
    "error_histogram",
    "load_report",
    "mape_blocks",
    "median_error",
    "profile_error",
    "resolve_range",
    "score_landings",
]
