import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..constants import HISTOGRAM_BINS
from ..gp import BlockScheme
from ..gp.kernel import FloatArray

logger = logging.getLogger(__name__)

TimeRange = tuple[int, int]


class ZeroNormError(ArithmeticError):
    """The measured profile has zero norm over the evaluation range."""


def resolve_range(eval_range: TimeRange | None, horizon: int) -> TimeRange:
    """Inclusive (start, end) clipped to 0..T; None means the whole horizon."""
    if eval_range is None:
        return 0, horizon
    start, end = int(eval_range[0]), int(eval_range[1])
    if start < 0 or end < start:
        raise ValueError(f"evaluation range must satisfy 0 <= start <= end, got {eval_range}")
    if start > horizon:
        raise ValueError(f"evaluation range {eval_range} starts after T={horizon}")
    return start, min(end, horizon)


def profile_error(y: FloatArray, f: FloatArray, eval_range: TimeRange | None = None) -> float:
    """||y - f|| / ||y|| over the inclusive time range."""
    y = np.asarray(y, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if y.shape != f.shape or y.ndim != 1:
        raise ValueError(f"profiles must be vectors of equal length, got {y.shape} and {f.shape}")
    start, end = resolve_range(eval_range, y.size - 1)
    y = y[start : end + 1]
    f = f[start : end + 1]
    norm = float(np.sqrt(np.sum(y**2)))
    if norm == 0.0:
        raise ZeroNormError(f"measured profile is zero over t={start}..{end}")
    return float(np.sqrt(np.sum((y - f) ** 2))) / norm


def aggregate_mape(errors_by_fold: Sequence[Sequence[float]]) -> float:
    """Mean over folds of the mean error of each fold's landings; empty folds are skipped."""
    fold_means = [float(np.mean(errors)) for errors in errors_by_fold if len(errors) > 0]
    if not fold_means:
        raise ValueError("no landing errors to aggregate")
    return float(np.mean(fold_means))


def median_error(errors_by_fold: Sequence[Sequence[float]]) -> float | None:
    pooled = [e for errors in errors_by_fold for e in errors]
    return float(np.median(pooled)) if pooled else None


@dataclass(frozen=True)
class BlockErrors:
    values: tuple[float | None, ...]
    excluded: tuple[int, ...]


def mape_blocks(
    measured_by_fold: Sequence[FloatArray],
    predicted_by_fold: Sequence[FloatArray],
    scheme: BlockScheme,
) -> BlockErrors:
    """
    MAPE restricted to each block: per block, the double average of profile_error over it.

    A landing whose measured profile is zero on a block is left out of that block only and
    counted in `excluded`; a block with no usable landing gets None.
    """
    values: list[float | None] = []
    excluded: list[int] = []
    for block in scheme.blocks:
        per_fold: list[list[float]] = []
        n_excluded = 0
        for measured, predicted in zip(measured_by_fold, predicted_by_fold, strict=True):
            errors = []
            for y, f in zip(measured, predicted, strict=True):
                try:
                    errors.append(profile_error(y, f, block))
                except ZeroNormError:
                    n_excluded += 1
            per_fold.append(errors)
        values.append(aggregate_mape(per_fold) if any(per_fold) else None)
        excluded.append(n_excluded)
        if n_excluded:
            logger.warning(f"block {block}: {n_excluded} landing(s) with zero measured norm excluded")
    return BlockErrors(values=tuple(values), excluded=tuple(excluded))


@dataclass(frozen=True)
class Histogram:
    """counts[s] = number of errors in [s/100, (s+1)/100); errors >= 1 go to `overflow`."""

    counts: tuple[int, ...]
    overflow: int

    @property
    def total(self) -> int:
        return sum(self.counts) + self.overflow


def error_histogram(errors: Sequence[float]) -> Histogram:
    errors = np.asarray(errors, dtype=np.float64)
    edges = np.arange(HISTOGRAM_BINS + 1) / HISTOGRAM_BINS
    in_range = errors[errors < 1.0]
    bins = np.searchsorted(edges, in_range, side="right") - 1
    counts = np.bincount(bins, minlength=HISTOGRAM_BINS)
    return Histogram(counts=tuple(int(c) for c in counts), overflow=int(np.sum(errors >= 1.0)))
