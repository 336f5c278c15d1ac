"""
Squared-exponential covariance over whole landing trajectories.

An input is a (C, T+1) array: one row per channel (C = 6 for landings). For two inputs the
kernel is

    k(a, b) = tau^2 * exp(-sum_k d_k(a, b) / (2 l_k)),   d_k = sum_t' w(t') (a_k^t' - b_k^t')^2,

with one length scale per channel, divided by 2 l_k (not 2 l_k^2). The time weight w is uniform,
a causal box (w(t') = 1 for t' <= t, else 0) or a custom non-negative vector.

Every entry is built from the same elementwise operations in the same order whichever argument
comes first, so k(a, b) == k(b, a) bit for bit and Gram matrices are exactly symmetric.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from ..constants import JITTER_FACTOR

FloatArray = npt.NDArray[np.float64]

# Upper bound on elements materialized per distance chunk
_CHUNK_ELEMENTS = 4_000_000


class WeightMode(StrEnum):
    UNIFORM = "uniform"
    CAUSAL_BOX = "causal-box"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Hyperparameters:
    """theta = (sigma, tau, l_1..l_C), all strictly positive."""

    noise_std: float
    amplitude: float
    length_scales: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "noise_std", float(self.noise_std))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "length_scales", tuple(float(x) for x in self.length_scales))
        values = (self.noise_std, self.amplitude, *self.length_scales)
        if not self.length_scales:
            raise ValueError("at least one length scale is required")
        if not all(np.isfinite(v) and v > 0 for v in values):
            raise ValueError(f"hyperparameters must be finite and strictly positive, got {values}")

    @property
    def n_params(self) -> int:
        return 2 + len(self.length_scales)

    def to_log_vector(self) -> FloatArray:
        """(log sigma, log tau, log l_1, ..., log l_C)."""
        return np.log(np.array([self.noise_std, self.amplitude, *self.length_scales]))

    @classmethod
    def from_log_vector(cls, log_theta: FloatArray) -> Hyperparameters:
        values = np.exp(np.asarray(log_theta, dtype=np.float64))
        return cls(noise_std=values[0], amplitude=values[1], length_scales=tuple(values[2:]))

    @property
    def jitter(self) -> float:
        return JITTER_FACTOR * self.amplitude**2

    def to_dict(self) -> dict:
        return {"noise_std": self.noise_std, "amplitude": self.amplitude, "length_scales": list(self.length_scales)}

    @classmethod
    def from_dict(cls, payload: dict) -> Hyperparameters:
        return cls(
            noise_std=payload["noise_std"],
            amplitude=payload["amplitude"],
            length_scales=tuple(payload["length_scales"]),
        )


@dataclass(frozen=True)
class TimeWeight:
    """
    Weight w(t') applied to squared differences in each channel's semi-norm.

    A causal-box weight without a `time` is time-varying: a model built with it uses the box
    ending at t for output column t. `at(t)` pins it to one time.
    """

    mode: WeightMode = WeightMode.UNIFORM
    weights: tuple[float, ...] | None = None
    time: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", WeightMode(self.mode))
        if self.mode == WeightMode.CUSTOM:
            if self.weights is None:
                raise ValueError("custom time weight needs a weight vector")
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            if not all(np.isfinite(w) and w >= 0 for w in self.weights):  # type: ignore[union-attr]
                raise ValueError("time weights must be finite and non-negative")
        elif self.weights is not None:
            raise ValueError(f"{self.mode} weight takes no weight vector")
        if self.time is not None and self.time < 0:
            raise ValueError(f"causal time must be non-negative, got {self.time}")

    @classmethod
    def uniform(cls) -> TimeWeight:
        return cls(WeightMode.UNIFORM)

    @classmethod
    def causal_box(cls, time: int | None = None) -> TimeWeight:
        return cls(WeightMode.CAUSAL_BOX, time=time)

    @classmethod
    def custom(cls, weights: Sequence[float]) -> TimeWeight:
        return cls(WeightMode.CUSTOM, weights=tuple(weights))

    @property
    def is_time_varying(self) -> bool:
        return self.mode == WeightMode.CAUSAL_BOX and self.time is None

    def at(self, t: int) -> TimeWeight:
        return replace(self, time=t) if self.mode == WeightMode.CAUSAL_BOX else self

    def vector(self, n_times: int) -> FloatArray:
        """Concrete w(0..T); an unpinned causal box covers the whole horizon."""
        match self.mode:
            case WeightMode.UNIFORM:
                return np.ones(n_times)
            case WeightMode.CUSTOM:
                weights = np.array(self.weights, dtype=np.float64)
                if weights.size != n_times:
                    raise ValueError(f"custom weight has {weights.size} entries, inputs have {n_times} samples")
                return weights
            case WeightMode.CAUSAL_BOX:
                end = n_times - 1 if self.time is None else self.time
                return (np.arange(n_times) <= end).astype(np.float64)
        raise ValueError(f"unknown weight mode {self.mode}")

    def to_dict(self) -> dict:
        return {"mode": str(self.mode), "weights": list(self.weights) if self.weights is not None else None}

    @classmethod
    def from_dict(cls, payload: dict) -> TimeWeight:
        weights = payload.get("weights")
        return cls(WeightMode(payload["mode"]), weights=tuple(weights) if weights is not None else None)


@dataclass(frozen=True)
class ChannelScaler:
    """Optional per-channel z-scoring of kernel inputs, fitted on training inputs."""

    mean: tuple[float, ...]
    std: tuple[float, ...]

    @classmethod
    def fit(cls, X: FloatArray) -> ChannelScaler:
        mean = X.mean(axis=(0, 2))
        std = X.std(axis=(0, 2))
        std = np.where(std > 0, std, 1.0)
        return cls(mean=tuple(float(m) for m in mean), std=tuple(float(s) for s in std))

    def transform(self, X: FloatArray) -> FloatArray:
        mean = np.array(self.mean)[None, :, None]
        std = np.array(self.std)[None, :, None]
        return (X - mean) / std

    def to_dict(self) -> dict:
        return {"mean": list(self.mean), "std": list(self.std)}

    @classmethod
    def from_dict(cls, payload: dict) -> ChannelScaler:
        return cls(mean=tuple(payload["mean"]), std=tuple(payload["std"]))


def as_input_tensor(X: FloatArray | Sequence[FloatArray]) -> FloatArray:
    """Stack a list of (C, T+1) inputs into an (n, C, T+1) tensor, checking shape and finiteness."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty (n, channels, T+1) input tensor, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("inputs contain non-finite values")
    return arr


def pairwise_sq_dists(X1: FloatArray, X2: FloatArray, weights: FloatArray) -> FloatArray:
    """
    Weighted squared distances per channel, shape (C, n1, n2).

    Entry [k, i, j] = sum_t w(t) (X1[i, k, t] - X2[j, k, t])^2.
    """
    n1, n_channels, n_times = X1.shape
    n2 = X2.shape[0]
    if X2.shape[1:] != (n_channels, n_times):
        raise ValueError(f"input shapes differ: {X1.shape[1:]} vs {X2.shape[1:]}")
    out = np.empty((n_channels, n1, n2))
    chunk = max(1, _CHUNK_ELEMENTS // max(1, n2 * n_times))
    for k in range(n_channels):
        for start in range(0, n1, chunk):
            stop = min(n1, start + chunk)
            diff = X1[start:stop, None, k, :] - X2[None, :, k, :]
            out[k, start:stop] = (weights * diff**2).sum(axis=-1)
    return out


def causal_sq_dists(X1: FloatArray, X2: FloatArray, times: Sequence[int]) -> FloatArray:
    """
    Causal-box distances for several end times at once, shape (len(times), C, n1, n2).

    Built from running sums over t', so one pass serves every time in the block.
    """
    n1, n_channels, _ = X1.shape
    n2 = X2.shape[0]
    times = list(times)
    out = np.empty((len(times), n_channels, n1, n2))
    last = max(times) + 1
    for k in range(n_channels):
        diff = X1[:, None, k, :last] - X2[None, :, k, :last]
        running = np.cumsum(diff**2, axis=-1)
        for i, t in enumerate(times):
            out[i, k] = running[:, :, t]
    return out


def kernel_from_distances(D: FloatArray, theta: Hyperparameters) -> FloatArray:
    """tau^2 exp(-sum_k D[k] / (2 l_k)), accumulated channel by channel in a fixed order."""
    if D.shape[0] != len(theta.length_scales):
        raise ValueError(f"{D.shape[0]} channels but {len(theta.length_scales)} length scales")
    exponent = np.zeros(D.shape[1:])
    for k, length in enumerate(theta.length_scales):
        exponent += D[k] / (2.0 * length)
    return theta.amplitude**2 * np.exp(-exponent)


def kernel_log_gradients(K: FloatArray, D: FloatArray, theta: Hyperparameters) -> list[FloatArray]:
    """d K / d log l_k for each channel; d K / d log tau is simply 2 K."""
    return [K * D[k] / (2.0 * length) for k, length in enumerate(theta.length_scales)]


def _check_channel(channel: int, n_channels: int) -> None:
    if not 0 <= channel < n_channels:
        raise ValueError(f"channel index {channel} outside 0..{n_channels - 1}")


def channel_sq_dist(a: FloatArray, b: FloatArray, channel: int, w: TimeWeight) -> float:
    """Sum_t' w(t') (a_k^t' - b_k^t')^2 for one channel k (0-based)."""
    X1 = as_input_tensor(a)
    X2 = as_input_tensor(b)
    _check_channel(channel, X1.shape[1])
    weights = w.vector(X1.shape[2])
    return float(pairwise_sq_dists(X1[:, channel : channel + 1], X2[:, channel : channel + 1], weights)[0, 0, 0])


def kernel_eval(a: FloatArray, b: FloatArray, theta: Hyperparameters, w: TimeWeight) -> float:
    return float(cross_gram(as_input_tensor(a), as_input_tensor(b), theta, w)[0, 0])


def gram(X: FloatArray | Sequence[FloatArray], theta: Hyperparameters, w: TimeWeight) -> FloatArray:
    """Symmetric n x n covariance matrix with diagonal tau^2."""
    X = as_input_tensor(X)
    return kernel_from_distances(pairwise_sq_dists(X, X, w.vector(X.shape[2])), theta)


def cross_gram(
    X1: FloatArray | Sequence[FloatArray],
    X2: FloatArray | Sequence[FloatArray],
    theta: Hyperparameters,
    w: TimeWeight,
) -> FloatArray:
    """n1 x n2 matrix of kernel values; cross_gram(X1, X2).T == cross_gram(X2, X1) exactly."""
    X1 = as_input_tensor(X1)
    X2 = as_input_tensor(X2)
    return kernel_from_distances(pairwise_sq_dists(X1, X2, w.vector(X1.shape[2])), theta)
