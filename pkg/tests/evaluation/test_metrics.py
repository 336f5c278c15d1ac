import numpy as np
import pytest

from landing_gp.evaluation import (
    ZeroNormError,
    aggregate_mape,
    error_histogram,
    mape_blocks,
    median_error,
    profile_error,
    resolve_range,
)
from landing_gp.gp import block_scheme

# ---------------------------------------------------------------------------
# profile_error
# ---------------------------------------------------------------------------


class TestProfileError:
    def test_examples(self):
        assert profile_error([3.0, 4.0], [0.0, 0.0]) == 1.0
        assert profile_error([3.0, 4.0], [3.0, 4.0]) == 0.0
        assert profile_error([3.0, 4.0], [3.0, 0.0]) == pytest.approx(0.8)

    def test_range_is_inclusive(self):
        y = [3.0, 4.0, 100.0]
        f = [3.0, 0.0, 0.0]
        assert profile_error(y, f, (1, 1)) == 1.0
        assert profile_error(y, f, (0, 0)) == 0.0
        assert profile_error(y, f, (0, 1)) == pytest.approx(0.8)

    def test_range_clipped_to_horizon(self):
        assert profile_error([3.0, 4.0], [3.0, 0.0], (0, 40)) == pytest.approx(0.8)

    def test_zero_norm(self):
        with pytest.raises(ZeroNormError):
            profile_error([0.0, 0.0, 5.0], [1.0, 1.0, 5.0], (0, 1))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            profile_error([1.0, 2.0], [1.0])

    def test_scale_invariant(self):
        y = np.array([2.0, -1.0, 5.0])
        f = np.array([1.5, 0.0, 4.0])
        assert profile_error(1e6 * y, 1e6 * f) == pytest.approx(profile_error(y, f))


class TestResolveRange:
    def test_none_is_full_horizon(self):
        assert resolve_range(None, 7) == (0, 7)

    def test_clipping(self):
        assert resolve_range((2, 40), 10) == (2, 10)

    @pytest.mark.parametrize("eval_range", [(-1, 3), (4, 2), (11, 12)])
    def test_invalid(self, eval_range):
        with pytest.raises(ValueError):
            resolve_range(eval_range, 10)


# ---------------------------------------------------------------------------
# Aggregates
# ---------------------------------------------------------------------------


def test_aggregate_is_mean_of_fold_means():
    assert aggregate_mape([[0.1, 0.3], [0.5]]) == pytest.approx(0.35)


def test_aggregate_skips_empty_folds():
    assert aggregate_mape([[0.2], []]) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        aggregate_mape([[], []])


def test_median_error_pools_folds():
    assert median_error([[0.1, 0.9], [0.2]]) == pytest.approx(0.2)
    assert median_error([[]]) is None


def test_histogram_bins():
    hist = error_histogram([0.0, 0.005, 0.01, 0.05, 0.999, 1.0, 2.5])
    assert len(hist.counts) == 100
    assert hist.counts[0] == 2
    assert hist.counts[1] == 1
    assert hist.counts[5] == 1
    assert hist.counts[99] == 1
    assert hist.overflow == 2
    assert hist.total == 7


def test_empty_histogram():
    hist = error_histogram([])
    assert hist.total == 0
    assert len(hist.counts) == 100


class TestMapeBlocks:
    def test_per_block_errors(self):
        scheme = block_scheme(3, 2)
        assert scheme.blocks == ((0, 2), (3, 3))
        measured = [np.array([[3.0, 4.0, 0.0, 2.0]]), np.array([[1.0, 0.0, 0.0, 4.0]])]
        predicted = [np.array([[3.0, 0.0, 0.0, 2.0]]), np.array([[1.0, 0.0, 0.0, 2.0]])]
        result = mape_blocks(measured, predicted, scheme)
        assert result.values[0] == pytest.approx((0.8 + 0.0) / 2)
        assert result.values[1] == pytest.approx((0.0 + 0.5) / 2)
        assert result.excluded == (0, 0)

    def test_zero_block_excluded_only_there(self, caplog):
        scheme = block_scheme(3, 2)
        measured = [np.array([[0.0, 0.0, 0.0, 2.0], [1.0, 1.0, 1.0, 1.0]])]
        predicted = [np.array([[1.0, 1.0, 1.0, 2.0], [1.0, 1.0, 1.0, 0.0]])]
        result = mape_blocks(measured, predicted, scheme)
        assert result.values == (0.0, pytest.approx(0.5))
        assert result.excluded == (1, 0)
        assert "excluded" in caplog.text

    def test_block_without_usable_landing(self):
        scheme = block_scheme(1, 2)
        result = mape_blocks([np.array([[0.0, 1.0]])], [np.array([[1.0, 1.0]])], scheme)
        assert result.values == (None, 0.0)
        assert result.excluded == (1, 0)
