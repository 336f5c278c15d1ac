import logging
from dataclasses import dataclass

import numpy as np
import polars as pl

from ..dataset import DatasetSchemaError, FlightDatabase, Landing
from ..gp import GpModel, predict_profile, predictive_variance
from ..gp.kernel import FloatArray
from ..schemas import AnomalyScoreRowSchema, cast_to_schema, empty_frame
from .metrics import TimeRange, ZeroNormError, profile_error, resolve_range

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AnomalyScore:
    """
    Deviation of a measured decel_force profile from the model's reconstruction.

    deviation[t] = measured - predicted; aggregate is the relative profile error over the
    evaluation range; z_like[t] scales the deviation by the predictive std sqrt(S*^t + sigma_t^2).
    """

    landing_id: int
    deviation: FloatArray
    aggregate: float
    z_like: FloatArray | None = None
    threshold: float | None = None

    @property
    def max_abs_z(self) -> float | None:
        return None if self.z_like is None else float(np.max(np.abs(self.z_like)))

    @property
    def flagged(self) -> bool | None:
        return None if self.threshold is None else self.aggregate > self.threshold


def anomaly_score(
    model: GpModel,
    landing: Landing,
    eval_range: TimeRange | None = None,
    *,
    with_variance: bool = False,
    threshold: float | None = None,
) -> AnomalyScore:
    if landing.decel_force is None:
        raise DatasetSchemaError(f"landing {landing.id} has no decel_force profile to score")
    predicted = predict_profile(model, landing.inputs())[0]
    deviation = landing.decel_force - predicted
    resolved = resolve_range(eval_range, model.horizon)
    aggregate = profile_error(landing.decel_force, predicted, resolved)

    z_like = None
    if with_variance:
        variance = predictive_variance(model, landing.inputs())[0]
        noise = np.array([model.theta_at(t).noise_std ** 2 for t in range(model.horizon + 1)])
        z_like = deviation / np.sqrt(variance + noise)
    return AnomalyScore(
        landing_id=landing.id, deviation=deviation, aggregate=aggregate, z_like=z_like, threshold=threshold
    )


def score_landings(
    model: GpModel,
    db: FlightDatabase,
    eval_range: TimeRange | None = None,
    *,
    with_variance: bool = False,
    threshold: float | None = None,
) -> pl.DataFrame:
    """Score every landing of `db`; landings with a zero measured norm are skipped with a warning."""
    rows = []
    for landing in db:
        try:
            score = anomaly_score(model, landing, eval_range, with_variance=with_variance, threshold=threshold)
        except ZeroNormError:
            logger.warning(f"landing {landing.id}: zero measured norm over the evaluation range, not scored")
            continue
        rows.append(
            {
                AnomalyScoreRowSchema.landing_id: score.landing_id,
                AnomalyScoreRowSchema.aggregate: score.aggregate,
                AnomalyScoreRowSchema.max_abs_z: score.max_abs_z,
                AnomalyScoreRowSchema.flagged: score.flagged,
            }
        )
    if not rows:
        return empty_frame(AnomalyScoreRowSchema)
    df = pl.DataFrame(rows, schema=empty_frame(AnomalyScoreRowSchema).schema)
    result = cast_to_schema(df.sort(AnomalyScoreRowSchema.landing_id), AnomalyScoreRowSchema)
    if threshold is not None:
        logger.info(f"{int(result[AnomalyScoreRowSchema.flagged].sum())} of {result.height} landings above {threshold}")
    return result
