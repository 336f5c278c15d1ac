import pandera.polars as pl_pa
import polars as pl
from pandera.typing import Series


class LandingRecordSchema(pl_pa.DataFrameModel):
    """One row per landing-second; the canonical landing CSV layout (column order is significant)."""

    landing_id: Series[pl.Int64] = pl_pa.Field(ge=0)
    t: Series[pl.Int64] = pl_pa.Field(ge=0)
    mass: Series[pl.Float64] = pl_pa.Field()
    kinetic_energy: Series[pl.Float64] = pl_pa.Field()
    speed: Series[pl.Float64] = pl_pa.Field()
    thrust: Series[pl.Float64] = pl_pa.Field()
    brake: Series[pl.Float64] = pl_pa.Field()
    drag: Series[pl.Float64] = pl_pa.Field()
    # Empty for prediction-only files
    decel_force: Series[pl.Float64] = pl_pa.Field(nullable=True)

    class Config:
        strict = True
        coerce = True


class ProfileRowSchema(pl_pa.DataFrameModel):
    """Predicted-vs-measured deceleration profiles (profiles.csv)."""

    landing_id: Series[pl.Int64] = pl_pa.Field(ge=0)
    t: Series[pl.Int64] = pl_pa.Field(ge=0)
    measured: Series[pl.Float64] = pl_pa.Field(nullable=True)
    predicted: Series[pl.Float64] = pl_pa.Field()
    model: Series[pl.String] = pl_pa.Field()

    class Config:
        strict = True
        coerce = True


class MapeRowSchema(pl_pa.DataFrameModel):
    """Global error per model (mape.csv)."""

    model: Series[pl.String] = pl_pa.Field()
    mape: Series[pl.Float64] = pl_pa.Field(ge=0, nullable=True)
    median_error: Series[pl.Float64] = pl_pa.Field(ge=0, nullable=True)

    class Config:
        strict = True
        coerce = True


class HistogramRowSchema(pl_pa.DataFrameModel):
    """Error histogram per model (hist.csv); bin_percent 100 holds the >= 100% overflow count."""

    model: Series[pl.String] = pl_pa.Field()
    bin_percent: Series[pl.Int64] = pl_pa.Field(ge=0, le=100)
    count: Series[pl.Int64] = pl_pa.Field(ge=0)

    class Config:
        strict = True
        coerce = True


class BlockMapeRowSchema(pl_pa.DataFrameModel):
    """Error restricted to each time block (blocks.csv)."""

    model: Series[pl.String] = pl_pa.Field()
    block_index: Series[pl.Int64] = pl_pa.Field(ge=1)
    mape_n: Series[pl.Float64] = pl_pa.Field(ge=0, nullable=True)

    class Config:
        strict = True
        coerce = True


class AnomalyScoreRowSchema(pl_pa.DataFrameModel):
    """Brake anomaly scores per landing (scores.csv)."""

    landing_id: Series[pl.Int64] = pl_pa.Field(ge=0)
    aggregate: Series[pl.Float64] = pl_pa.Field(ge=0)
    max_abs_z: Series[pl.Float64] = pl_pa.Field(nullable=True)
    flagged: Series[pl.Boolean] = pl_pa.Field(nullable=True)

    class Config:
        strict = True
        coerce = True
