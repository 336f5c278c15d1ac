from __future__ import annotations

import hashlib
import json
import logging
import time
from pathlib import Path

import numpy as np
import pandera.polars as pl_pa
import polars as pl
from platformdirs import user_data_dir

from ..dataset import DatasetSchemaError, FlightDatabase, Landing
from ..schemas import LandingRecordSchema, cast_to_schema, dtypes_from_schema, to_canonical_strings
from ..validation import DEFAULT_ERRORS, DEFAULT_FLAGS, run_checks
from ..validation.models import ROW_COLUMN

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = Path(user_data_dir(appname="landing_gp")) / "runs"

LANDING_COLUMNS = list(dtypes_from_schema(LandingRecordSchema))
NULLABLE_COLUMNS = {LandingRecordSchema.decel_force}
FIRST_DATA_LINE = 2  # line 1 is the header


def get_default_output_dir() -> Path:
    DEFAULT_OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    return DEFAULT_OUTPUT_DIR


def write_canonical_csv(df: pl.DataFrame, schema: type[pl_pa.DataFrameModel], path: str | Path) -> None:
    """Validate against *schema* and write with shortest round-trip floats, LF line endings."""
    validated = cast_to_schema(df, schema)
    Path(path).write_text(to_canonical_strings(validated).write_csv(), encoding="utf-8")


def _parse_raw_records(raw: pl.DataFrame) -> pl.DataFrame:
    """Cast the all-string frame to schema dtypes, naming the first malformed row."""
    dtypes = dtypes_from_schema(LandingRecordSchema)
    typed = raw.with_columns(
        [pl.col(col).str.strip_chars().cast(dtype, strict=False).alias(col) for col, dtype in dtypes.items()]
    )
    bad_masks = []
    for col in LANDING_COLUMNS:
        failed_cast = raw[col].is_not_null() & (raw[col].str.strip_chars() != "") & typed[col].is_null()
        if col in NULLABLE_COLUMNS:
            missing = pl.Series([False] * raw.height, dtype=pl.Boolean)
        else:
            missing = raw[col].is_null()
        bad_masks.append((failed_cast | missing).fill_null(False).alias(col))
    bad = pl.DataFrame(bad_masks).with_columns(raw[ROW_COLUMN])
    offending = bad.filter(pl.any_horizontal(LANDING_COLUMNS))
    if offending.height > 0:
        first = offending.row(0, named=True)
        columns = [col for col in LANDING_COLUMNS if first[col]]
        raise DatasetSchemaError(f"malformed or missing value in column(s) {', '.join(columns)}", row=first[ROW_COLUMN])
    return typed


def _frame_to_database(records: pl.DataFrame) -> FlightDatabase:
    if records.height == 0:
        return FlightDatabase(horizon=0, landings=())
    landings = []
    for group in records.sort([LandingRecordSchema.landing_id, LandingRecordSchema.t]).partition_by(
        LandingRecordSchema.landing_id, maintain_order=True
    ):
        target = group[LandingRecordSchema.decel_force]
        landings.append(
            Landing(
                id=int(group[LandingRecordSchema.landing_id][0]),
                mass=float(group[LandingRecordSchema.mass][0]),
                kinetic_energy=float(group[LandingRecordSchema.kinetic_energy][0]),
                speed=group[LandingRecordSchema.speed].to_numpy(),
                thrust=group[LandingRecordSchema.thrust].to_numpy(),
                brake=group[LandingRecordSchema.brake].to_numpy(),
                drag=group[LandingRecordSchema.drag].to_numpy(),
                decel_force=None if target.null_count() == len(target) else target.to_numpy(),
            )
        )
    return FlightDatabase.from_landings(landings)


def load_csv(path: str | Path) -> FlightDatabase:
    """
    Load a landing CSV (header ``landing_id,t,mass,kinetic_energy,speed,thrust,brake,drag,decel_force``).

    Raises:
        DatasetSchemaError: on a wrong header, malformed or non-finite values, landings with
            differing horizons, or other record-check failures; ``.row`` names the file line.
    """
    start_time = time.perf_counter()
    path = Path(path)
    try:
        raw = pl.read_csv(path, infer_schema=False)
    except (pl.exceptions.ComputeError, pl.exceptions.NoDataError) as exc:
        raise DatasetSchemaError(f"{path}: cannot parse CSV: {exc}") from exc

    if raw.columns != LANDING_COLUMNS:
        raise DatasetSchemaError(f"header must be {','.join(LANDING_COLUMNS)}, got {','.join(raw.columns)}", row=1)

    raw = raw.with_row_index(ROW_COLUMN, offset=FIRST_DATA_LINE).with_columns(pl.col(ROW_COLUMN).cast(pl.Int64))
    typed = _parse_raw_records(raw)

    result = run_checks(typed, DEFAULT_ERRORS, DEFAULT_FLAGS)
    first_error = result.first_error
    if first_error is not None:
        raise DatasetSchemaError(
            f"landing {first_error['landing_id']}: {first_error['name']}: {first_error['explanation']}",
            row=first_error[ROW_COLUMN],
        )
    if len(result.flag_log) > 0:
        logger.warning(f"{len(result.flag_log)} flagged rows in {path}, first: {result.flag_log.row(0, named=True)}")

    records = cast_to_schema(typed.drop(ROW_COLUMN), LandingRecordSchema)
    db = _frame_to_database(records)
    logger.info(
        f"Loaded {db.n_ob} landings (T={db.horizon}, {records.height} rows) from {path} "
        f"in {time.perf_counter() - start_time:.2f}s"
    )
    return db


def database_to_frame(db: FlightDatabase) -> pl.DataFrame:
    """Canonical record frame: rows sorted by landing id then t."""
    landings = sorted(db.landings, key=lambda landing: landing.id)
    n_times = db.horizon + 1
    if not landings:
        return pl.DataFrame(schema=dtypes_from_schema(LandingRecordSchema))

    def stacked(attr: str) -> np.ndarray:
        return np.concatenate([getattr(landing, attr) for landing in landings])

    targets = np.concatenate(
        [landing.decel_force if landing.decel_force is not None else np.full(n_times, np.nan) for landing in landings]
    )
    df = pl.DataFrame(
        {
            LandingRecordSchema.landing_id: np.repeat([landing.id for landing in landings], n_times),
            LandingRecordSchema.t: np.tile(np.arange(n_times), len(landings)),
            LandingRecordSchema.mass: np.repeat([landing.mass for landing in landings], n_times),
            LandingRecordSchema.kinetic_energy: np.repeat([landing.kinetic_energy for landing in landings], n_times),
            LandingRecordSchema.speed: stacked("speed"),
            LandingRecordSchema.thrust: stacked("thrust"),
            LandingRecordSchema.brake: stacked("brake"),
            LandingRecordSchema.drag: stacked("drag"),
            LandingRecordSchema.decel_force: pl.Series(targets, nan_to_null=True),
        }
    )
    return cast_to_schema(df, LandingRecordSchema)


def render_csv(db: FlightDatabase) -> str:
    return to_canonical_strings(database_to_frame(db)).write_csv()


def database_digest(db: FlightDatabase) -> str:
    """SHA-256 of the canonical CSV form; equal databases always share a digest."""
    return hashlib.sha256(render_csv(db).encode()).hexdigest()


def save_csv(db: FlightDatabase, path: str | Path) -> None:
    """Write the canonical CSV: fixed column order, shortest round-trip floats, rows sorted by (id, t)."""
    path = Path(path)
    path.write_text(render_csv(db), encoding="utf-8")
    logger.info(f"Wrote {db.n_ob} landings to {path}")


def write_json(payload: dict, path: str | Path) -> None:
    """Deterministic JSON: sorted keys, compact separators, floats in shortest round-trip form."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
