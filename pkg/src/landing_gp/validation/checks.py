"""
Record checks over the typed landing frame (one row per landing-second, with a `row` column
holding the 1-based file line). The frame is sorted by (landing_id, t) before checks run.
"""

import polars as pl

from ..dataset.models import KINETIC_ENERGY_RTOL
from ..schemas import LandingRecordSchema
from .models import ErrorCheck, ErrorList, FlagCheck, FlagList

INPUT_COLUMNS = [
    LandingRecordSchema.mass,
    LandingRecordSchema.kinetic_energy,
    LandingRecordSchema.speed,
    LandingRecordSchema.thrust,
    LandingRecordSchema.brake,
    LandingRecordSchema.drag,
]

_landing = LandingRecordSchema.landing_id


def non_finite_error() -> ErrorCheck:
    target = pl.col(LandingRecordSchema.decel_force)
    expr = pl.any_horizontal([~pl.col(col).is_finite() for col in INPUT_COLUMNS]) | (
        target.is_not_null() & ~target.is_finite()
    )
    return ErrorCheck(name="NON_FINITE_VALUE", expr=expr, explanation="value is NaN or infinite")


NON_FINITE_ERROR = non_finite_error()

NON_POSITIVE_MASS_ERROR = ErrorCheck(
    name="NON_POSITIVE_MASS",
    expr=pl.col(LandingRecordSchema.mass) <= 0,
    explanation="mass must be strictly positive",
)


def constant_within_landing_error(col: str) -> ErrorCheck:
    """Scalars (mass, kinetic energy) are repeated on every row of a landing and must not change."""
    return ErrorCheck(
        name=f"{col.upper()}_VARIES_WITHIN_LANDING",
        expr=pl.col(col) != pl.col(col).first().over(_landing),
        explanation=f"{col} differs from the value on the landing's first row",
    )


MASS_VARIES_ERROR = constant_within_landing_error(LandingRecordSchema.mass)
KINETIC_ENERGY_VARIES_ERROR = constant_within_landing_error(LandingRecordSchema.kinetic_energy)

# Each landing must list t = 0, 1, ..., T exactly once
TIME_INDEX_ERROR = ErrorCheck(
    name="TIME_INDEX_GAP",
    expr=pl.col(LandingRecordSchema.t) != pl.int_range(pl.len()).over(_landing),
    explanation="time index is not the contiguous sequence 0..T within the landing",
)

# Every landing must have as many rows as the first landing in the file
HORIZON_MISMATCH_ERROR = ErrorCheck(
    name="INCONSISTENT_HORIZON",
    expr=pl.len().over(_landing) != pl.len().over(_landing).first(),
    explanation="landing has a different number of rows than the first landing",
)

PARTIAL_TARGET_ERROR = ErrorCheck(
    name="PARTIAL_DECEL_FORCE",
    expr=pl.col(LandingRecordSchema.decel_force).null_count().over(_landing).is_between(1, pl.len().over(_landing) - 1),
    explanation="decel_force must be filled on every row of a landing or on none",
)


def kinetic_energy_flag(rtol: float = KINETIC_ENERGY_RTOL) -> FlagCheck:
    """
    Kinetic energy should equal 1/2 m (v^0)^2 when it was derived from the recorded speed.
    Real recorders may compute it from a different speed source, so this only flags.
    """
    expected = 0.5 * pl.col(LandingRecordSchema.mass) * pl.col(LandingRecordSchema.speed) ** 2
    energy = pl.col(LandingRecordSchema.kinetic_energy)
    tolerance = rtol * pl.max_horizontal(expected.abs(), energy.abs())
    return FlagCheck(
        name="KINETIC_ENERGY_INCONSISTENT",
        expr=(pl.col(LandingRecordSchema.t) == 0) & ((energy - expected).abs() > tolerance),
        explanation=f"kinetic_energy differs from 1/2 m v0^2 by more than {rtol} relative",
    )


KINETIC_ENERGY_FLAG = kinetic_energy_flag()

DEFAULT_ERRORS = ErrorList(
    [
        NON_FINITE_ERROR,
        NON_POSITIVE_MASS_ERROR,
        MASS_VARIES_ERROR,
        KINETIC_ENERGY_VARIES_ERROR,
        TIME_INDEX_ERROR,
        HORIZON_MISMATCH_ERROR,
        PARTIAL_TARGET_ERROR,
    ]
)

DEFAULT_FLAGS = FlagList([KINETIC_ENERGY_FLAG])
