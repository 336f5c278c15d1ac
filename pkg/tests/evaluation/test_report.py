import json

import polars as pl
import pytest

from landing_gp.dataset import split_folds
from landing_gp.evaluation import cross_validate, emit_report, load_report
from landing_gp.gp import ModelFormatError
from landing_gp.regressors import LinearRegressor
from landing_gp.schemas import BlockMapeRowSchema, HistogramRowSchema, MapeRowSchema, ProfileRowSchema


@pytest.fixture
def report(small_db):
    return cross_validate(small_db, LinearRegressor(), split_folds(small_db.n_ob, 2, 3, seed=1))


def test_writes_every_file(report, tmp_path):
    written = emit_report(report, tmp_path / "out")
    names = sorted(path.name for path in written)
    assert names == ["blocks.csv", "hist.csv", "mape.csv", "profiles.csv", "report.json"]


def test_csv_contents(report, tmp_path, small_db):
    emit_report(report, tmp_path, fmt="csv")
    assert not (tmp_path / "report.json").exists()

    profiles = pl.read_csv(tmp_path / "profiles.csv")
    assert profiles.columns == ["landing_id", "t", "measured", "predicted", "model"]
    assert profiles.height == 6 * (small_db.horizon + 1)
    assert profiles[ProfileRowSchema.landing_id].is_sorted()

    mape = pl.read_csv(tmp_path / "mape.csv")
    assert mape[MapeRowSchema.model].to_list() == ["lr"]
    assert mape[MapeRowSchema.mape][0] == pytest.approx(report.mape)

    hist = pl.read_csv(tmp_path / "hist.csv")
    assert hist.height == 101
    assert hist[HistogramRowSchema.bin_percent].to_list() == list(range(101))
    assert hist[HistogramRowSchema.count].sum() == 6

    blocks = pl.read_csv(tmp_path / "blocks.csv")
    assert blocks[BlockMapeRowSchema.block_index].to_list() == list(range(1, 11))


def _relabeled(report, label):
    payload = report.to_dict()
    payload["model"] = label
    return type(report).from_dict(payload)


def test_several_models_in_one_report(report, tmp_path):
    other = _relabeled(report, "rf")
    emit_report([report, other], tmp_path, fmt="csv")
    mape = pl.read_csv(tmp_path / "mape.csv")
    assert mape[MapeRowSchema.model].to_list() == ["lr", "rf"]


def test_json_reloads_to_the_same_reports(report, tmp_path):
    emit_report(report, tmp_path, fmt="json")
    assert load_report(tmp_path) == [report]
    assert load_report(tmp_path / "report.json") == [report]


def test_output_is_byte_stable(report, tmp_path):
    emit_report(report, tmp_path / "a")
    emit_report(load_report(tmp_path / "a"), tmp_path / "b")
    for name in ("profiles.csv", "mape.csv", "hist.csv", "blocks.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_no_reports_writes_headers_only(tmp_path):
    emit_report([], tmp_path, fmt="csv")
    assert (tmp_path / "profiles.csv").read_text() == "landing_id,t,measured,predicted,model\n"
    assert (tmp_path / "mape.csv").read_text() == "model,mape,median_error\n"


def test_unsupported_version(report, tmp_path):
    emit_report(report, tmp_path, fmt="json")
    payload = json.loads((tmp_path / "report.json").read_text())
    payload["format_version"] = 99
    (tmp_path / "report.json").write_text(json.dumps(payload))
    with pytest.raises(ModelFormatError):
        load_report(tmp_path)
