from .converters import cast_to_schema, dtypes_from_schema, empty_frame, to_canonical_strings
from .models import (
    AnomalyScoreRowSchema,
    BlockMapeRowSchema,
    HistogramRowSchema,
    LandingRecordSchema,
    MapeRowSchema,
    ProfileRowSchema,
)

__all__ = [
    "AnomalyScoreRowSchema",
    "BlockMapeRowSchema",
    "HistogramRowSchema",
    "LandingRecordSchema",
    "MapeRowSchema",
    "ProfileRowSchema",
    "cast_to_schema",
    "dtypes_from_schema",
    "empty_frame",
    "to_canonical_strings",
]
