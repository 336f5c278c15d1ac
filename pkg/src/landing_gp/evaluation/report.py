"""Plot-ready report files: one CSV per figure kind plus a JSON with everything."""

import logging
from collections.abc import Sequence
from enum import StrEnum
from pathlib import Path

import polars as pl

from ..constants import MODEL_FORMAT_VERSION
from ..gp import ModelFormatError
from ..io import read_json, write_canonical_csv, write_json
from ..schemas import BlockMapeRowSchema, HistogramRowSchema, MapeRowSchema, ProfileRowSchema, empty_frame
from .crossval import EvalReport

logger = logging.getLogger(__name__)

PROFILES_FILE = "profiles.csv"
MAPE_FILE = "mape.csv"
HISTOGRAM_FILE = "hist.csv"
BLOCKS_FILE = "blocks.csv"
REPORT_FILE = "report.json"


class ReportFormat(StrEnum):
    CSV = "csv"
    JSON = "json"
    ALL = "all"


def _frame(rows: list[dict], schema) -> pl.DataFrame:
    template = empty_frame(schema)
    if not rows:
        return template
    return pl.DataFrame(rows, schema=template.schema)


def profiles_frame(reports: Sequence[EvalReport]) -> pl.DataFrame:
    rows = [
        {
            ProfileRowSchema.landing_id: landing.landing_id,
            ProfileRowSchema.t: t,
            ProfileRowSchema.measured: measured,
            ProfileRowSchema.predicted: predicted,
            ProfileRowSchema.model: report.model_label,
        }
        for report in reports
        for landing in sorted(report.landings, key=lambda landing: landing.landing_id)
        for t, (measured, predicted) in enumerate(zip(landing.measured, landing.predicted, strict=True))
    ]
    return _frame(rows, ProfileRowSchema)


def mape_frame(reports: Sequence[EvalReport]) -> pl.DataFrame:
    rows = [
        {
            MapeRowSchema.model: report.model_label,
            MapeRowSchema.mape: report.mape,
            MapeRowSchema.median_error: report.median_error,
        }
        for report in reports
    ]
    return _frame(rows, MapeRowSchema)


def histogram_frame(reports: Sequence[EvalReport]) -> pl.DataFrame:
    # the last bin_percent (100) carries the overflow count
    rows = [
        {
            HistogramRowSchema.model: report.model_label,
            HistogramRowSchema.bin_percent: s,
            HistogramRowSchema.count: count,
        }
        for report in reports
        for s, count in enumerate([*report.histogram, report.overflow])
    ]
    return _frame(rows, HistogramRowSchema)


def blocks_frame(reports: Sequence[EvalReport]) -> pl.DataFrame:
    rows = [
        {
            BlockMapeRowSchema.model: report.model_label,
            BlockMapeRowSchema.block_index: n,
            BlockMapeRowSchema.mape_n: value,
        }
        for report in reports
        for n, value in enumerate(report.mape_per_block, start=1)
    ]
    return _frame(rows, BlockMapeRowSchema)


def emit_report(
    reports: EvalReport | Sequence[EvalReport],
    path: str | Path,
    fmt: ReportFormat | str = ReportFormat.ALL,
) -> list[Path]:
    """
    Write the report files for one or more models into directory `path`.

    csv: profiles.csv, mape.csv, hist.csv, blocks.csv; json: report.json. Output bytes depend
    only on the reports.
    """
    if isinstance(reports, EvalReport):
        reports = [reports]
    fmt = ReportFormat(fmt)
    out_dir = Path(path)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if fmt in (ReportFormat.CSV, ReportFormat.ALL):
        for name, frame, schema in (
            (PROFILES_FILE, profiles_frame(reports), ProfileRowSchema),
            (MAPE_FILE, mape_frame(reports), MapeRowSchema),
            (HISTOGRAM_FILE, histogram_frame(reports), HistogramRowSchema),
            (BLOCKS_FILE, blocks_frame(reports), BlockMapeRowSchema),
        ):
            write_canonical_csv(frame, schema, out_dir / name)
            written.append(out_dir / name)
    if fmt in (ReportFormat.JSON, ReportFormat.ALL):
        payload = {"format_version": MODEL_FORMAT_VERSION, "reports": [report.to_dict() for report in reports]}
        write_json(payload, out_dir / REPORT_FILE)
        written.append(out_dir / REPORT_FILE)

    logger.info(f"Wrote {len(written)} report file(s) for {len(reports)} model(s) to {out_dir}")
    return written


def load_report(path: str | Path) -> list[EvalReport]:
    """Read the reports back from a report.json (or the directory holding one)."""
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_FILE
    payload = read_json(path)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported report format_version {payload.get('format_version')!r}")
    return [EvalReport.from_dict(report) for report in payload["reports"]]
