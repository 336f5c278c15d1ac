from __future__ import annotations

import copy
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..constants import DEFAULT_BLOCKS, DEFAULT_EVAL_END, DEFAULT_EVAL_START
from ..dataset import FlightDatabase, FoldPlan, fold_plan_digest
from ..gp import BlockScheme, block_scheme
from ..io import database_digest
from ..regressors import Regressor
from .metrics import (
    TimeRange,
    ZeroNormError,
    aggregate_mape,
    error_histogram,
    mape_blocks,
    median_error,
    profile_error,
    resolve_range,
)

logger = logging.getLogger(__name__)

DEFAULT_EVAL_RANGE: TimeRange = (DEFAULT_EVAL_START, DEFAULT_EVAL_END)


class FoldError(RuntimeError):
    """Fitting or predicting failed inside a cross-validation fold."""

    def __init__(self, fold: int, message: str):
        self.fold = fold
        super().__init__(f"fold {fold}: {message}")


@dataclass(frozen=True)
class FoldSummary:
    fold: int
    n_train: int
    n_test: int
    train_digest: str
    mape: float | None


@dataclass(frozen=True)
class LandingResult:
    """One held-out landing: its fold, relative profile error (None if excluded) and both profiles."""

    landing_id: int
    fold: int
    error: float | None
    measured: tuple[float, ...]
    predicted: tuple[float, ...]


@dataclass(frozen=True)
class EvalReport:
    model_label: str
    mape: float | None
    median_error: float | None
    mape_per_block: tuple[float | None, ...]
    block_exclusions: tuple[int, ...]
    blocks: tuple[tuple[int, int], ...]
    histogram: tuple[int, ...]
    overflow: int
    eval_range: TimeRange
    fold_plan_digest: str
    folds: tuple[FoldSummary, ...] = ()
    landings: tuple[LandingResult, ...] = ()
    config: dict = field(default_factory=dict)

    @property
    def per_landing_error(self) -> list[tuple[int, float | None]]:
        return [(landing.landing_id, landing.error) for landing in self.landings]

    def to_dict(self) -> dict:
        return {
            "model": self.model_label,
            "mape": self.mape,
            "median_error": self.median_error,
            "mape_per_block": list(self.mape_per_block),
            "block_exclusions": list(self.block_exclusions),
            "blocks": [list(block) for block in self.blocks],
            "histogram": list(self.histogram),
            "overflow": self.overflow,
            "eval_range": list(self.eval_range),
            "fold_plan_digest": self.fold_plan_digest,
            "folds": [
                {
                    "fold": fold.fold,
                    "n_train": fold.n_train,
                    "n_test": fold.n_test,
                    "train_digest": fold.train_digest,
                    "mape": fold.mape,
                }
                for fold in self.folds
            ],
            "landings": [
                {
                    "landing_id": landing.landing_id,
                    "fold": landing.fold,
                    "error": landing.error,
                    "measured": list(landing.measured),
                    "predicted": list(landing.predicted),
                }
                for landing in self.landings
            ],
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> EvalReport:
        return cls(
            model_label=payload["model"],
            mape=payload["mape"],
            median_error=payload["median_error"],
            mape_per_block=tuple(payload["mape_per_block"]),
            block_exclusions=tuple(payload["block_exclusions"]),
            blocks=tuple((start, end) for start, end in payload["blocks"]),
            histogram=tuple(payload["histogram"]),
            overflow=payload["overflow"],
            eval_range=(payload["eval_range"][0], payload["eval_range"][1]),
            fold_plan_digest=payload["fold_plan_digest"],
            folds=tuple(FoldSummary(**fold) for fold in payload["folds"]),
            landings=tuple(
                LandingResult(
                    landing_id=landing["landing_id"],
                    fold=landing["fold"],
                    error=landing["error"],
                    measured=tuple(landing["measured"]),
                    predicted=tuple(landing["predicted"]),
                )
                for landing in payload["landings"]
            ),
            config=payload.get("config", {}),
        )


@dataclass(frozen=True)
class _FoldOutcome:
    summary: FoldSummary
    landings: tuple[LandingResult, ...]
    measured: np.ndarray
    predicted: np.ndarray


def _run_fold(
    db: FlightDatabase, template: Regressor, plan: FoldPlan, fold: int, eval_range: TimeRange
) -> _FoldOutcome:
    start_time = time.perf_counter()
    train = db.subset(plan.train_indices(fold))
    test = db.subset(plan.folds[fold])
    regressor = copy.deepcopy(template)
    try:
        regressor.fit(train)
        predicted = regressor.predict(test)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        raise FoldError(fold, f"{template.label} failed: {exc}") from exc
    measured = test.targets()

    landings = []
    errors = []
    for landing, y, f in zip(test, measured, predicted, strict=True):
        try:
            error: float | None = profile_error(y, f, eval_range)
            errors.append(error)
        except ZeroNormError:
            logger.warning(f"fold {fold}: landing {landing.id} has zero measured norm on {eval_range}, excluded")
            error = None
        landings.append(
            LandingResult(
                landing_id=landing.id,
                fold=fold,
                error=error,
                measured=tuple(float(v) for v in y),
                predicted=tuple(float(v) for v in f),
            )
        )
    summary = FoldSummary(
        fold=fold,
        n_train=train.n_ob,
        n_test=test.n_ob,
        train_digest=database_digest(train),
        mape=float(np.mean(errors)) if errors else None,
    )
    logger.info(
        f"{template.label} fold {fold + 1}/{plan.n_folds}: mape "
        f"{'n/a' if summary.mape is None else f'{summary.mape:.4f}'} in {time.perf_counter() - start_time:.2f}s"
    )
    return _FoldOutcome(summary=summary, landings=tuple(landings), measured=measured, predicted=predicted)


def cross_validate(
    db: FlightDatabase,
    regressor: Regressor,
    plan: FoldPlan,
    eval_range: TimeRange | None = DEFAULT_EVAL_RANGE,
    *,
    scheme: BlockScheme | None = None,
    threads: int = 1,
    config: dict | None = None,
) -> EvalReport:
    """
    Fit a fresh copy of `regressor` on each fold's complement and score its held-out landings.

    Per-block errors use `scheme` (by default ten blocks, or one per time step on short
    horizons). Folds may run concurrently; results are always assembled in fold order.
    """
    if plan.n_ob != db.n_ob:
        raise ValueError(f"fold plan is for {plan.n_ob} landings, database has {db.n_ob}")
    if not db.has_targets:
        raise ValueError("cross-validation needs decel_force on every landing")
    resolved = resolve_range(eval_range, db.horizon)
    scheme = scheme or block_scheme(db.horizon, min(DEFAULT_BLOCKS, db.horizon + 1))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        outcomes = list(pool.map(lambda p: _run_fold(db, regressor, plan, p, resolved), range(plan.n_folds)))

    errors_by_fold = [
        [landing.error for landing in outcome.landings if landing.error is not None] for outcome in outcomes
    ]
    pooled = [e for errors in errors_by_fold for e in errors]
    blocks = mape_blocks([o.measured for o in outcomes], [o.predicted for o in outcomes], scheme)
    histogram = error_histogram(pooled)
    report = EvalReport(
        model_label=regressor.label,
        mape=aggregate_mape(errors_by_fold) if pooled else None,
        median_error=median_error(errors_by_fold),
        mape_per_block=blocks.values,
        block_exclusions=blocks.excluded,
        blocks=scheme.blocks,
        histogram=histogram.counts,
        overflow=histogram.overflow,
        eval_range=resolved,
        fold_plan_digest=fold_plan_digest(plan),
        folds=tuple(outcome.summary for outcome in outcomes),
        landings=tuple(landing for outcome in outcomes for landing in outcome.landings),
        config={**regressor.describe(), **(config or {})},
    )
    logger.info(
        f"{report.model_label}: mape {report.mape} median {report.median_error} over {len(pooled)} landings"
    )
    return report
