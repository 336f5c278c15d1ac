from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..config import digest_text
from ..constants import JITTER_FACTOR, MODEL_FORMAT_VERSION, VARIANCE_CLAMP
from .kernel import (
    ChannelScaler,
    FloatArray,
    Hyperparameters,
    TimeWeight,
    as_input_tensor,
    causal_sq_dists,
    kernel_from_distances,
    kernel_log_gradients,
    pairwise_sq_dists,
)

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


class FactorizationError(np.linalg.LinAlgError):
    """K + sigma^2 I + jitter is not numerically positive definite."""


class NegativeVarianceError(ArithmeticError):
    """A posterior variance came out below -VARIANCE_CLAMP."""


class HorizonMismatchError(ValueError):
    pass


class ModelFormatError(ValueError):
    """A serialized model is malformed, has an unsupported format_version or fails its content digest."""


# Everything predictions depend on; diagnostics and data_digest are informational.
_DIGESTED_KEYS = ("horizon", "blocks", "thetas", "train_ids", "train_inputs", "alpha", "weight", "standardize")


def model_content_digest(payload: dict) -> str:
    canonical = json.dumps({key: payload[key] for key in _DIGESTED_KEYS}, sort_keys=True, separators=(",", ":"))
    return digest_text(canonical)


@dataclass(frozen=True)
class Factorization:
    """Lower Cholesky factor of K + (sigma^2 + jitter) I."""

    lower: FloatArray
    diagonal_shift: float

    def solve(self, rhs: FloatArray) -> FloatArray:
        return scipy.linalg.cho_solve((self.lower, True), rhs, check_finite=False)

    def inverse(self) -> FloatArray:
        return self.solve(np.eye(self.lower.shape[0]))

    def log_det(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))

    def whiten(self, rhs: FloatArray) -> FloatArray:
        """L^{-1} rhs."""
        return scipy.linalg.solve_triangular(self.lower, rhs, lower=True, check_finite=False)


def factorize(K: FloatArray, sigma: float, jitter: float | None = None) -> Factorization:
    """
    Cholesky-factorize K + sigma^2 I + jitter I.

    The jitter defaults to JITTER_FACTOR times the largest diagonal entry of K, which is
    JITTER_FACTOR * tau^2 for any Gram matrix built by this package.
    """
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K.shape}")
    if jitter is None:
        jitter = JITTER_FACTOR * float(np.max(np.diag(K))) if K.size else 0.0
    shift = sigma**2 + jitter
    try:
        lower = scipy.linalg.cholesky(K + shift * np.eye(K.shape[0]), lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationError(f"Cholesky factorization failed (sigma={sigma:g}, jitter={jitter:g}): {exc}") from exc
    return Factorization(lower=lower, diagonal_shift=shift)


@dataclass(frozen=True)
class PosteriorResult:
    mean: FloatArray
    covariance: FloatArray | None = None

    @property
    def variance(self) -> FloatArray | None:
        return None if self.covariance is None else np.diag(self.covariance).copy()


def clamp_variances(variances: FloatArray) -> FloatArray:
    """Zero out round-off negatives; anything below -VARIANCE_CLAMP is a real failure."""
    worst = float(np.min(variances)) if variances.size else 0.0
    if worst < -VARIANCE_CLAMP:
        raise NegativeVarianceError(f"posterior variance {worst:g} below -{VARIANCE_CLAMP:g}")
    return np.maximum(variances, 0.0)


def posterior(
    X_d: FloatArray,
    Y_t: FloatArray,
    X_star: FloatArray,
    theta: Hyperparameters,
    w: TimeWeight,
    want_cov: bool = False,
) -> PosteriorResult:
    """
    Posterior mean K_{*d} (K_dd + sigma^2 I)^{-1} Y_t and, on request, covariance
    K_** - K_{*d} (K_dd + sigma^2 I)^{-1} K_{d*}.

    Y_t may be a vector of length n_ob or an (n_ob, b) matrix of target columns.
    """
    X_d = as_input_tensor(X_d)
    X_star = as_input_tensor(X_star)
    Y_t = np.asarray(Y_t, dtype=np.float64)
    if Y_t.shape[0] != X_d.shape[0]:
        raise ValueError(f"{Y_t.shape[0]} targets for {X_d.shape[0]} training inputs")
    weights = w.vector(X_d.shape[2])

    K = kernel_from_distances(pairwise_sq_dists(X_d, X_d, weights), theta)
    fac = factorize(K, theta.noise_std, theta.jitter)
    K_star = kernel_from_distances(pairwise_sq_dists(X_star, X_d, weights), theta)
    mean = K_star @ fac.solve(Y_t)
    if not want_cov:
        return PosteriorResult(mean=mean)

    K_ss = kernel_from_distances(pairwise_sq_dists(X_star, X_star, weights), theta)
    V = fac.whiten(K_star.T)
    cov = K_ss - V.T @ V
    cov = 0.5 * (cov + cov.T)
    np.fill_diagonal(cov, clamp_variances(np.diag(cov)))
    return PosteriorResult(mean=mean, covariance=cov)


@dataclass(frozen=True)
class LmlValue:
    value: float
    gradient: FloatArray | None = None


def lml_from_distances(D: FloatArray, Y: FloatArray, theta: Hyperparameters, want_grad: bool = True) -> LmlValue:
    """
    Summed log marginal likelihood of the columns of Y under one shared factorization.

    Gradient order: (log sigma, log tau, log l_1..l_C). Uses
    d/d theta_j = 1/2 sum((A A^T - b C^{-1}) o dC/d theta_j) for b target columns, with the
    tau-dependent jitter included in dC/d log tau.
    """
    if Y.ndim == 1:
        Y = Y[:, None]
    n, n_cols = Y.shape
    K = kernel_from_distances(D, theta)
    jitter = theta.jitter
    fac = factorize(K, theta.noise_std, jitter)
    A = fac.solve(Y)
    value = -0.5 * float(np.sum(Y * A)) - 0.5 * n_cols * fac.log_det() - 0.5 * n_cols * n * LOG_2PI
    if not want_grad:
        return LmlValue(value=value)

    W = A @ A.T - n_cols * fac.inverse()
    trace_w = float(np.trace(W))
    grad = np.empty(theta.n_params)
    grad[0] = theta.noise_std**2 * trace_w
    grad[1] = float(np.sum(W * K)) + jitter * trace_w
    for k, dK in enumerate(kernel_log_gradients(K, D, theta)):
        grad[2 + k] = 0.5 * float(np.sum(W * dK))
    return LmlValue(value=value, gradient=grad)


def log_marginal_likelihood(
    X_d: FloatArray,
    Y_t: FloatArray,
    theta: Hyperparameters,
    w: TimeWeight,
    want_grad: bool = True,
) -> LmlValue:
    """-1/2 Y^T (K + sigma^2 I)^{-1} Y - 1/2 log det(K + sigma^2 I) - n/2 log 2 pi."""
    X_d = as_input_tensor(X_d)
    D = pairwise_sq_dists(X_d, X_d, w.vector(X_d.shape[2]))
    return lml_from_distances(D, np.asarray(Y_t, dtype=np.float64), theta, want_grad)


@dataclass(frozen=True, eq=False)
class GpModel:
    """
    A fitted reconstruction map: per-block hyperparameters plus precomputed alpha^t.

    Output column t uses the hyperparameters of the block containing t, and alpha[t] holds
    (K + sigma^2 I)^{-1} Y^t for that block's factorization (the factorization at t itself
    when the weight is a time-varying causal box).
    """

    horizon: int
    blocks: tuple[tuple[int, int], ...]
    thetas: tuple[Hyperparameters, ...]
    train_ids: tuple[int, ...]
    train_inputs: FloatArray
    alpha: FloatArray
    data_digest: str
    weight: TimeWeight = field(default_factory=TimeWeight.uniform)
    scaler: ChannelScaler | None = None
    diagnostics: tuple[dict, ...] = ()

    def __post_init__(self):
        n_times = self.horizon + 1
        covered = [t for start, end in self.blocks for t in range(start, end + 1)]
        if covered != list(range(n_times)):
            raise ValueError(f"blocks {self.blocks} do not partition 0..{self.horizon}")
        if len(self.thetas) != len(self.blocks):
            raise ValueError(f"{len(self.thetas)} hyperparameter sets for {len(self.blocks)} blocks")
        if self.train_inputs.ndim != 3 or self.train_inputs.shape[2] != n_times:
            raise ValueError(f"training inputs of shape {self.train_inputs.shape} do not match T={self.horizon}")
        if self.alpha.shape != (n_times, self.train_inputs.shape[0]):
            raise ValueError(f"alpha shape {self.alpha.shape} != {(n_times, self.train_inputs.shape[0])}")
        if len(self.train_ids) != self.train_inputs.shape[0]:
            raise ValueError("one training id per training input is required")

    @property
    def n_ob(self) -> int:
        return self.train_inputs.shape[0]

    def block_index(self, t: int) -> int:
        for m, (start, end) in enumerate(self.blocks):
            if start <= t <= end:
                return m
        raise IndexError(f"t={t} outside 0..{self.horizon}")

    def theta_at(self, t: int) -> Hyperparameters:
        return self.thetas[self.block_index(t)]

    def kernel_inputs(self, X: FloatArray) -> FloatArray:
        return X if self.scaler is None else self.scaler.transform(X)

    def predict(self, X_star: FloatArray) -> FloatArray:
        return predict_profile(self, X_star)

    def to_dict(self) -> dict:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "horizon": self.horizon,
            "blocks": [list(block) for block in self.blocks],
            "thetas": [theta.to_dict() for theta in self.thetas],
            "train_ids": list(self.train_ids),
            "train_inputs": self.train_inputs.tolist(),
            "alpha": self.alpha.tolist(),
            "data_digest": self.data_digest,
            "weight": self.weight.to_dict(),
            "standardize": None if self.scaler is None else self.scaler.to_dict(),
            "diagnostics": list(self.diagnostics),
        }
        payload["content_digest"] = model_content_digest(payload)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> GpModel:
        version = payload.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format_version {version!r}, expected {MODEL_FORMAT_VERSION}")
        try:
            stored = payload["content_digest"]
            actual = model_content_digest(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"malformed model file: {exc}") from exc
        if stored != actual:
            raise ModelFormatError(
                f"model content does not match its content_digest ({str(stored)[:12]} != {actual[:12]})"
            )
        try:
            scaler = payload.get("standardize")
            return cls(
                horizon=int(payload["horizon"]),
                blocks=tuple((int(start), int(end)) for start, end in payload["blocks"]),
                thetas=tuple(Hyperparameters.from_dict(theta) for theta in payload["thetas"]),
                train_ids=tuple(int(i) for i in payload["train_ids"]),
                train_inputs=np.array(payload["train_inputs"], dtype=np.float64),
                alpha=np.array(payload["alpha"], dtype=np.float64),
                data_digest=str(payload["data_digest"]),
                weight=TimeWeight.from_dict(payload["weight"]),
                scaler=None if scaler is None else ChannelScaler.from_dict(scaler),
                diagnostics=tuple(payload.get("diagnostics", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"malformed model file: {exc}") from exc


def _check_horizon(model: GpModel, X_star: FloatArray) -> FloatArray:
    X_star = as_input_tensor(X_star)
    if X_star.shape[1:] != model.train_inputs.shape[1:]:
        raise HorizonMismatchError(
            f"inputs of shape {X_star.shape[1:]} do not match the model's "
            f"{model.train_inputs.shape[1:]} (T={model.horizon})"
        )
    return X_star


def _block_distances(model: GpModel, X1: FloatArray, X2: FloatArray, block: tuple[int, int]) -> FloatArray:
    """Distances for every t of a block: shape (len, C, n1, n2) if time-varying, else (C, n1, n2)."""
    start, end = block
    if model.weight.is_time_varying:
        return causal_sq_dists(X1, X2, range(start, end + 1))
    return pairwise_sq_dists(X1, X2, model.weight.vector(model.horizon + 1))


def predict_profile(model: GpModel, X_star: FloatArray) -> FloatArray:
    """Predicted profiles, shape (n_test, T+1); row i column t = k(x*_i, X_d; theta_t) . alpha^t."""
    X_star = _check_horizon(model, X_star)
    Xs = model.kernel_inputs(X_star)
    Xd = model.kernel_inputs(model.train_inputs)
    out = np.empty((X_star.shape[0], model.horizon + 1))
    shared: FloatArray | None = None
    for block, theta in zip(model.blocks, model.thetas, strict=True):
        start, end = block
        if model.weight.is_time_varying:
            D_block = _block_distances(model, Xs, Xd, block)
            for i, t in enumerate(range(start, end + 1)):
                out[:, t] = kernel_from_distances(D_block[i], theta) @ model.alpha[t]
        else:
            if shared is None:
                shared = _block_distances(model, Xs, Xd, block)
            K_star = kernel_from_distances(shared, theta)
            out[:, start : end + 1] = K_star @ model.alpha[start : end + 1].T
    return out


def predictive_variance(model: GpModel, X_star: FloatArray) -> FloatArray:
    """Diagonal of S*^t for every test input and t, shape (n_test, T+1)."""
    X_star = _check_horizon(model, X_star)
    Xs = model.kernel_inputs(X_star)
    Xd = model.kernel_inputs(model.train_inputs)
    out = np.empty((X_star.shape[0], model.horizon + 1))

    def column_variance(D_dd: FloatArray, D_sd: FloatArray, theta: Hyperparameters) -> FloatArray:
        fac = factorize(kernel_from_distances(D_dd, theta), theta.noise_std, theta.jitter)
        V = fac.whiten(kernel_from_distances(D_sd, theta).T)
        return clamp_variances(theta.amplitude**2 - np.sum(V**2, axis=0))

    for block, theta in zip(model.blocks, model.thetas, strict=True):
        start, end = block
        D_dd = _block_distances(model, Xd, Xd, block)
        D_sd = _block_distances(model, Xs, Xd, block)
        if model.weight.is_time_varying:
            for i, t in enumerate(range(start, end + 1)):
                out[:, t] = column_variance(D_dd[i], D_sd[i], theta)
        else:
            out[:, start : end + 1] = column_variance(D_dd, D_sd, theta)[:, None]
    return out
