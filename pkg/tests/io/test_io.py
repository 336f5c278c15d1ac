"""Tests for landing_gp.io."""

import polars as pl
import pytest
from polars.testing import assert_frame_equal

from landing_gp.dataset import DatasetSchemaError, FlightDatabase
from landing_gp.io import (
    database_digest,
    database_to_frame,
    load_csv,
    read_json,
    render_csv,
    save_csv,
    write_json,
)
from landing_gp.schemas import LandingRecordSchema, cast_to_schema, dtypes_from_schema, empty_frame
from tests.conftest import make_landing

HEADER = "landing_id,t,mass,kinetic_energy,speed,thrust,brake,drag,decel_force"

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def _csv_lines(rows: list[str]) -> str:
    return "\n".join([HEADER, *rows]) + "\n"


def _valid_rows() -> list[str]:
    # one landing, T=1, kinetic energy 1/2 * 2 * 10^2
    return [
        "0,0,2.0,100.0,10.0,50.0,0.0,300.0,40.0",
        "0,1,2.0,100.0,8.0,32.0,4.0,192.0,30.0",
    ]


@pytest.fixture
def write_csv(tmp_path):
    def _write(rows: list[str], name: str = "landings.csv"):
        path = tmp_path / name
        path.write_text(_csv_lines(rows))
        return path

    return _write


# ---------------------------------------------------------------------------
# dtypes_from_schema / cast_to_schema
# ---------------------------------------------------------------------------


class TestSchemas:
    def test_dtypes_in_declaration_order(self):
        dtypes = dtypes_from_schema(LandingRecordSchema)
        assert ",".join(dtypes) == HEADER
        assert dtypes[LandingRecordSchema.t] == pl.Int64
        assert dtypes[LandingRecordSchema.speed] == pl.Float64

    def test_empty_frame_has_columns(self):
        df = empty_frame(LandingRecordSchema)
        assert df.height == 0
        assert df.columns == HEADER.split(",")

    def test_cast_reorders_columns(self):
        df = database_to_frame(FlightDatabase.from_landings([make_landing(0, horizon=1)]))
        shuffled = df.select(list(reversed(df.columns)))
        assert_frame_equal(cast_to_schema(shuffled, LandingRecordSchema), df)


# ---------------------------------------------------------------------------
# load_csv
# ---------------------------------------------------------------------------


class TestLoadCsv:
    def test_valid_file(self, write_csv):
        db = load_csv(write_csv(_valid_rows()))
        assert db.n_ob == 1
        assert db.horizon == 1
        assert db[0].speed.tolist() == [10.0, 8.0]
        assert db[0].decel_force.tolist() == [40.0, 30.0]

    def test_rows_out_of_order(self, write_csv):
        db = load_csv(write_csv(list(reversed(_valid_rows()))))
        assert db[0].speed.tolist() == [10.0, 8.0]

    def test_empty_target_column(self, write_csv):
        rows = [row.rsplit(",", 1)[0] + "," for row in _valid_rows()]
        db = load_csv(write_csv(rows))
        assert not db.has_targets

    def test_header_only(self, write_csv):
        db = load_csv(write_csv([]))
        assert db.n_ob == 0
        assert db.horizon == 0

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,t\n0,0\n")
        with pytest.raises(DatasetSchemaError) as exc:
            load_csv(path)
        assert exc.value.row == 1

    def test_malformed_value_names_line(self, write_csv):
        rows = _valid_rows()
        rows[1] = rows[1].replace("8.0", "fast", 1)
        with pytest.raises(DatasetSchemaError, match="speed") as exc:
            load_csv(write_csv(rows))
        assert exc.value.row == 3

    def test_non_finite_value(self, write_csv):
        rows = _valid_rows()
        rows[0] = rows[0].replace("300.0", "inf")
        with pytest.raises(DatasetSchemaError, match="NON_FINITE") as exc:
            load_csv(write_csv(rows))
        assert exc.value.row == 2

    def test_missing_required_value(self, write_csv):
        rows = _valid_rows()
        rows[1] = "0,1,2.0,100.0,,32.0,4.0,192.0,30.0"
        with pytest.raises(DatasetSchemaError, match="speed"):
            load_csv(write_csv(rows))

    def test_inconsistent_horizons(self, write_csv):
        rows = [*_valid_rows(), "1,0,2.0,100.0,10.0,50.0,0.0,300.0,40.0"]
        with pytest.raises(DatasetSchemaError, match="INCONSISTENT_HORIZON"):
            load_csv(write_csv(rows))

    def test_partial_target(self, write_csv):
        rows = _valid_rows()
        rows[1] = rows[1].rsplit(",", 1)[0] + ","
        with pytest.raises(DatasetSchemaError, match="PARTIAL_DECEL_FORCE"):
            load_csv(write_csv(rows))

    def test_inconsistent_kinetic_energy_only_warns(self, write_csv, caplog):
        rows = [row.replace(",100.0,", ",99.0,") for row in _valid_rows()]
        db = load_csv(write_csv(rows))
        assert db[0].kinetic_energy == 99.0
        assert "flagged" in caplog.text


# ---------------------------------------------------------------------------
# save_csv / digests
# ---------------------------------------------------------------------------


class TestSaveCsv:
    def test_save_then_load_preserves_database(self, small_db, tmp_path):
        path = tmp_path / "db.csv"
        save_csv(small_db, path)
        assert load_csv(path) == small_db

    def test_canonical_bytes(self, small_db, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        save_csv(small_db, first)
        save_csv(load_csv(first), second)
        assert first.read_bytes() == second.read_bytes()
        assert first.read_text().splitlines()[0] == HEADER

    def test_rows_sorted_by_id(self):
        db = FlightDatabase.from_landings([make_landing(5, horizon=1), make_landing(2, horizon=1)])
        ids = [line.split(",")[0] for line in render_csv(db).splitlines()[1:]]
        assert ids == ["2", "2", "5", "5"]

    def test_missing_target_written_empty(self):
        db = FlightDatabase.from_landings([make_landing(0, horizon=1, target=False)])
        assert all(line.endswith(",") for line in render_csv(db).splitlines()[1:])

    def test_digest_ignores_landing_order(self):
        a = FlightDatabase.from_landings([make_landing(0), make_landing(1)])
        b = FlightDatabase.from_landings([make_landing(1), make_landing(0)])
        assert database_digest(a) == database_digest(b)
        assert database_digest(a) != database_digest(a.subset([0]))


def test_json_is_sorted_and_compact(tmp_path):
    path = tmp_path / "x.json"
    write_json({"b": 1, "a": [0.1, 2.0]}, path)
    assert path.read_text() == '{"a":[0.1,2.0],"b":1}\n'
    assert read_json(path) == {"a": [0.1, 2.0], "b": 1}
