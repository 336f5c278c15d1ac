import math

import numpy as np
import pytest

from landing_gp.gp import (
    FactorizationError,
    GpModel,
    HorizonMismatchError,
    Hyperparameters,
    ModelFormatError,
    NegativeVarianceError,
    OptimizerConfig,
    TimeWeight,
    block_scheme,
    factorize,
    fit_model,
    gram,
    init_hyperparameters,
    kernel_eval,
    log_marginal_likelihood,
    posterior,
    predict_profile,
    predictive_variance,
)
from landing_gp.gp.core import clamp_variances
from landing_gp.gp.hyperfit import BlockObjective
from landing_gp.gp.kernel import cross_gram
from landing_gp.io import read_json, write_json
from tests.conftest import random_inputs, random_theta, synthetic_db

QUICK = OptimizerConfig(max_iters=5, restarts=1)


def _dense_covariance(X, theta, w=None):
    w = w or TimeWeight.uniform()
    K = gram(X, theta, w)
    return K + (theta.noise_std**2 + theta.jitter) * np.eye(K.shape[0])


# ---------------------------------------------------------------------------
# factorize
# ---------------------------------------------------------------------------


class TestFactorize:
    def test_small_example(self):
        fac = factorize(np.array([[4.0, 2.0], [2.0, 3.0]]), sigma=1.0, jitter=0.0)
        np.testing.assert_allclose(fac.lower @ fac.lower.T, [[5.0, 2.0], [2.0, 4.0]])
        assert fac.log_det() == pytest.approx(math.log(16.0))
        np.testing.assert_allclose(fac.solve(np.array([5.0, 2.0])), [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(fac.inverse() @ [[5.0, 2.0], [2.0, 4.0]], np.eye(2), atol=1e-12)

    def test_default_jitter_scales_with_diagonal(self):
        fac = factorize(np.eye(3) * 4.0, sigma=0.0)
        assert fac.diagonal_shift == pytest.approx(4e-8)

    def test_indefinite_matrix(self):
        with pytest.raises(FactorizationError):
            factorize(np.array([[1.0, 2.0], [2.0, 1.0]]), sigma=0.0, jitter=0.0)

    def test_non_finite_matrix(self):
        with pytest.raises(FactorizationError):
            factorize(np.array([[np.nan, 0.0], [0.0, 1.0]]), sigma=1.0, jitter=0.0)

    def test_not_square(self):
        with pytest.raises(ValueError, match="square"):
            factorize(np.ones((2, 3)), sigma=1.0)

    def test_is_linalg_error(self):
        assert issubclass(FactorizationError, np.linalg.LinAlgError)


def test_clamp_variances():
    np.testing.assert_array_equal(clamp_variances(np.array([-1e-12, 0.5])), [0.0, 0.5])
    with pytest.raises(NegativeVarianceError):
        clamp_variances(np.array([-1e-3, 0.5]))


# ---------------------------------------------------------------------------
# posterior / log marginal likelihood
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(50))
def test_posterior_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    n, horizon = int(rng.integers(1, 21)), int(rng.integers(0, 11))
    X = random_inputs(rng, n, horizon)
    y = rng.standard_normal(n)
    theta = random_theta(rng, horizon)
    X_star = random_inputs(rng, 3, horizon)
    w = TimeWeight.uniform()
    result = posterior(X, y, X_star, theta, w, want_cov=True)

    C = _dense_covariance(X, theta)
    K_star = cross_gram(X_star, X, theta, w)
    expected_mean = K_star @ np.linalg.solve(C, y)
    expected_cov = gram(X_star, theta, w) - K_star @ np.linalg.solve(C, K_star.T)
    np.testing.assert_allclose(result.mean, expected_mean, rtol=0, atol=1e-8)
    np.testing.assert_allclose(result.covariance, expected_cov, rtol=0, atol=1e-8)
    assert np.all(result.variance >= 0)
    assert np.array_equal(result.covariance, result.covariance.T)



def test_posterior_accepts_target_matrix(gp_problem):
    X, Y, theta = gp_problem
    w = TimeWeight.uniform()
    together = posterior(X, Y, X[:2], theta, w).mean
    for t in range(Y.shape[1]):
        single = posterior(X, Y[:, t], X[:2], theta, w).mean
        np.testing.assert_allclose(together[:, t], single, rtol=1e-10, atol=1e-12)


def test_posterior_interpolates_with_small_noise(rng):
    X = random_inputs(rng, 5, 3)
    y = rng.standard_normal(5)
    theta = Hyperparameters(noise_std=1e-4, amplitude=1.0, length_scales=(8.0,) * 6)
    result = posterior(X, y, X, theta, TimeWeight.uniform(), want_cov=True)
    np.testing.assert_allclose(result.mean, y, atol=1e-4)
    assert np.all(result.variance < 1e-6)


def test_posterior_target_count_mismatch(gp_problem):
    X, Y, theta = gp_problem
    with pytest.raises(ValueError, match="targets"):
        posterior(X, Y[:-1, 0], X, theta, TimeWeight.uniform())


def test_lml_closed_form(gp_problem):
    X, Y, theta = gp_problem
    y = Y[:, 1]
    C = _dense_covariance(X, theta)
    _, logdet = np.linalg.slogdet(C)
    expected = -0.5 * y @ np.linalg.solve(C, y) - 0.5 * logdet - 0.5 * len(y) * math.log(2 * math.pi)
    assert log_marginal_likelihood(X, y, theta, TimeWeight.uniform()).value == pytest.approx(expected, rel=1e-10)


def test_lml_sums_over_columns(gp_problem):
    X, Y, theta = gp_problem
    w = TimeWeight.uniform()
    total = log_marginal_likelihood(X, Y, theta, w)
    parts = [log_marginal_likelihood(X, Y[:, t], theta, w) for t in range(Y.shape[1])]
    assert total.value == pytest.approx(sum(p.value for p in parts), rel=1e-10)
    np.testing.assert_allclose(total.gradient, sum(p.gradient for p in parts), rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_lml_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(1000 + seed)
    n, horizon = int(rng.integers(2, 13)), int(rng.integers(1, 7))
    X = random_inputs(rng, n, horizon)
    y = rng.standard_normal(n)
    theta = random_theta(rng, horizon)
    weight = TimeWeight.uniform() if seed % 2 == 0 else TimeWeight.causal_box(horizon // 2)
    log_theta = theta.to_log_vector()
    analytic = log_marginal_likelihood(X, y, theta, weight).gradient
    h = 1e-5
    numeric = np.empty_like(log_theta)
    for j in range(log_theta.size):
        up, down = log_theta.copy(), log_theta.copy()
        up[j] += h
        down[j] -= h
        f_up = log_marginal_likelihood(X, y, Hyperparameters.from_log_vector(up), weight, want_grad=False).value
        f_down = log_marginal_likelihood(X, y, Hyperparameters.from_log_vector(down), weight, want_grad=False).value
        numeric[j] = (f_up - f_down) / (2 * h)
    np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-5 * max(1.0, np.abs(analytic).max()))



def test_lml_without_gradient(gp_problem):
    X, Y, theta = gp_problem
    assert log_marginal_likelihood(X, Y[:, 0], theta, TimeWeight.uniform(), want_grad=False).gradient is None


def test_tiny_noise_model_reproduces_training_profiles():
    db = synthetic_db(20, seed=8)
    X, Y = db.inputs(), db.targets()
    block = (0, db.horizon)
    start = init_hyperparameters(X, Y, block).theta
    theta = Hyperparameters(noise_std=1e-6, amplitude=start.amplitude, length_scales=start.length_scales)
    model = GpModel(
        horizon=db.horizon,
        blocks=(block,),
        thetas=(theta,),
        train_ids=tuple(db.ids),
        train_inputs=X,
        alpha=BlockObjective(X, Y, block, TimeWeight.uniform()).alpha(theta),
        data_digest="interpolation",
    )
    predicted = predict_profile(model, X)
    relative = np.abs(predicted - Y) / np.abs(Y).max(axis=1, keepdims=True)
    assert relative.max() < 1e-3


def test_posterior_mean_is_linear_in_targets(gp_problem, rng):
    X, Y, theta = gp_problem
    X_star = random_inputs(rng, 4, X.shape[2] - 1)
    w = TimeWeight.uniform()
    y1, y2 = Y[:, 0], Y[:, 1]
    a, b = 2.5, -0.75
    combined = posterior(X, a * y1 + b * y2, X_star, theta, w).mean
    separate = a * posterior(X, y1, X_star, theta, w).mean + b * posterior(X, y2, X_star, theta, w).mean
    np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_posterior_variance_bounded_by_prior(seed):
    rng = np.random.default_rng(2000 + seed)
    horizon = int(rng.integers(0, 6))
    X = random_inputs(rng, int(rng.integers(1, 15)), horizon)
    theta = random_theta(rng, horizon)
    X_star = np.concatenate([X[:2], random_inputs(rng, 4, horizon)])
    variance = posterior(X, np.zeros(X.shape[0]), X_star, theta, TimeWeight.uniform(), want_cov=True).variance
    assert np.all(variance <= theta.amplitude**2 + 1e-10)
    assert np.all(variance >= 0)


def test_single_landing_closed_forms(rng):
    horizon = 3
    x, x_star = random_inputs(rng, 1, horizon), random_inputs(rng, 1, horizon)
    theta = random_theta(rng, horizon)
    w = TimeWeight.uniform()
    y = 1.7
    c = theta.amplitude**2 + theta.noise_std**2 + theta.jitter
    k = kernel_eval(x_star[0], x[0], theta, w)

    result = posterior(x, np.array([y]), x_star, theta, w, want_cov=True)
    assert result.mean[0] == pytest.approx(k * y / c, rel=1e-12)
    assert result.variance[0] == pytest.approx(theta.amplitude**2 - k**2 / c, rel=1e-10, abs=1e-12)
    expected_lml = -0.5 * y**2 / c - 0.5 * math.log(c) - 0.5 * math.log(2 * math.pi)
    assert log_marginal_likelihood(x, np.array([y]), theta, w).value == pytest.approx(expected_lml, rel=1e-12)


# ---------------------------------------------------------------------------
# GpModel
# ---------------------------------------------------------------------------


@pytest.fixture
def fitted_model(small_db):
    return fit_model(small_db, block_scheme(small_db.horizon, 3), QUICK)


class TestGpModel:
    def test_shapes(self, fitted_model, small_db):
        assert fitted_model.horizon == small_db.horizon
        assert fitted_model.blocks == ((0, 3), (4, 7), (8, 10))
        assert fitted_model.alpha.shape == (small_db.horizon + 1, small_db.n_ob)
        assert fitted_model.train_ids == tuple(small_db.ids)
        assert len(fitted_model.diagnostics) == 3

    def test_theta_at_follows_blocks(self, fitted_model):
        assert fitted_model.theta_at(0) is fitted_model.thetas[0]
        assert fitted_model.theta_at(7) is fitted_model.thetas[1]
        assert fitted_model.theta_at(10) is fitted_model.thetas[2]
        with pytest.raises(IndexError):
            fitted_model.block_index(11)

    def test_predict_matches_posterior(self, fitted_model, small_db):
        X_star = small_db.inputs()[:4] * 1.01
        predicted = predict_profile(fitted_model, X_star)
        Y = small_db.targets()
        for t in range(small_db.horizon + 1):
            expected = posterior(small_db.inputs(), Y[:, t], X_star, fitted_model.theta_at(t), TimeWeight.uniform())
            np.testing.assert_allclose(predicted[:, t], expected.mean, rtol=1e-6, atol=1e-6 * np.abs(Y).max())

    def test_variance_matches_posterior(self, fitted_model, small_db):
        X_d, Y = small_db.inputs(), small_db.targets()
        X_star = X_d[:3] * 0.99
        variance = predictive_variance(fitted_model, X_star)
        for t in (0, 5, 10):
            theta = fitted_model.theta_at(t)
            expected = posterior(X_d, Y[:, t], X_star, theta, TimeWeight.uniform(), want_cov=True).variance
            scale = fitted_model.theta_at(t).amplitude ** 2
            np.testing.assert_allclose(variance[:, t], expected, rtol=1e-6, atol=1e-9 * scale)
        assert np.all(variance >= 0)

    def test_prediction_rows_independent(self, fitted_model, small_db):
        X = small_db.inputs()
        together = predict_profile(fitted_model, X[:5])
        np.testing.assert_allclose(predict_profile(fitted_model, X[2:3])[0], together[2], rtol=1e-9, atol=1e-6)

    def test_horizon_mismatch(self, fitted_model):
        with pytest.raises(HorizonMismatchError):
            predict_profile(fitted_model, np.zeros((1, 6, 5)))

    def test_json_round_trip_predicts_identically(self, fitted_model, small_db, tmp_path):
        path = tmp_path / "model.json"
        write_json(fitted_model.to_dict(), path)
        restored = GpModel.from_dict(read_json(path))
        assert restored.thetas == fitted_model.thetas
        assert restored.data_digest == fitted_model.data_digest
        np.testing.assert_array_equal(
            predict_profile(restored, small_db.inputs()), predict_profile(fitted_model, small_db.inputs())
        )

    def test_unsupported_format_version(self, fitted_model):
        payload = fitted_model.to_dict()
        payload["format_version"] = 2
        with pytest.raises(ModelFormatError, match="format_version"):
            GpModel.from_dict(payload)

    def test_malformed_payload(self, fitted_model):
        payload = fitted_model.to_dict()
        del payload["alpha"]
        with pytest.raises(ModelFormatError, match="malformed"):
            GpModel.from_dict(payload)

    @pytest.mark.parametrize(
        "edit",
        [
            lambda p: p["train_inputs"][0][0].__setitem__(0, p["train_inputs"][0][0][0] + 1.0),
            lambda p: p["alpha"][3].__setitem__(1, 0.0),
            lambda p: p["thetas"][0].__setitem__("amplitude", 2.0 * p["thetas"][0]["amplitude"]),
            lambda p: p["train_ids"].reverse(),
        ],
        ids=["train_inputs", "alpha", "theta", "train_ids"],
    )
    def test_edited_content_is_rejected(self, fitted_model, edit):
        payload = fitted_model.to_dict()
        edit(payload)
        with pytest.raises(ModelFormatError, match="content_digest"):
            GpModel.from_dict(payload)

    def test_missing_content_digest(self, fitted_model):
        payload = fitted_model.to_dict()
        del payload["content_digest"]
        with pytest.raises(ModelFormatError, match="malformed"):
            GpModel.from_dict(payload)

    def test_diagnostics_are_not_digested(self, fitted_model):
        payload = fitted_model.to_dict()
        payload["diagnostics"] = []
        assert GpModel.from_dict(payload).diagnostics == ()

    def test_rejects_blocks_that_do_not_partition(self, fitted_model):
        with pytest.raises(ValueError, match="partition"):
            GpModel(
                horizon=fitted_model.horizon,
                blocks=((0, 3), (5, 10)),
                thetas=fitted_model.thetas[:2],
                train_ids=fitted_model.train_ids,
                train_inputs=fitted_model.train_inputs,
                alpha=fitted_model.alpha,
                data_digest="",
            )


def test_causal_box_model_matches_pinned_posterior(small_db):
    model = fit_model(small_db, block_scheme(small_db.horizon, 2), QUICK, TimeWeight.causal_box())
    X_star = small_db.inputs()[:3] * 1.02
    predicted = predict_profile(model, X_star)
    Y = small_db.targets()
    for t in (0, 4, 10):
        expected = posterior(small_db.inputs(), Y[:, t], X_star, model.theta_at(t), TimeWeight.causal_box(t))
        np.testing.assert_allclose(predicted[:, t], expected.mean, rtol=1e-6, atol=1e-6 * np.abs(Y).max())


def test_standardized_model_predicts_in_raw_units(small_db):
    model = fit_model(small_db, block_scheme(small_db.horizon, 1), QUICK, standardize=True)
    assert model.scaler is not None
    np.testing.assert_array_equal(model.train_inputs, small_db.inputs())
    predicted = predict_profile(model, small_db.inputs())
    assert predicted.shape == (small_db.n_ob, small_db.horizon + 1)
    assert np.all(np.isfinite(predicted))
