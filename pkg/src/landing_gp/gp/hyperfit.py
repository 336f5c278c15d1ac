"""
Blockwise hyperparameter fitting.

The horizon 0..T is split into N consecutive blocks; each block gets one theta chosen by
maximizing the sum over its times of the per-t log marginal likelihood. Blocks are fitted
independently and the fitted model stores alpha^t for every t.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..config import ConfigError, derive_seed, parse_float, parse_int
from ..constants import (
    DEFAULT_CONVERGENCE_TOL,
    DEFAULT_INIT_STEP,
    DEFAULT_MAX_ITERS,
    DEFAULT_RESTARTS,
    INIT_NOISE_RATIO,
    LOG_PARAM_BOUNDS,
    MAX_STEP_HALVINGS,
    RESTART_FACTOR_RANGE,
)
from ..dataset import FlightDatabase
from ..io import database_digest
from .core import FactorizationError, GpModel, LmlValue, factorize, lml_from_distances
from .kernel import (
    ChannelScaler,
    FloatArray,
    Hyperparameters,
    TimeWeight,
    as_input_tensor,
    causal_sq_dists,
    kernel_from_distances,
    pairwise_sq_dists,
)

logger = logging.getLogger(__name__)

Block = tuple[int, int]


@dataclass(frozen=True)
class BlockScheme:
    """Block end times T_1 < ... < T_N = T; block m spans [T_{m-1} + 1, T_m] with the first starting at 0."""

    boundaries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        if not self.boundaries:
            raise ValueError("a block scheme needs at least one block")
        if self.boundaries[0] < 0 or any(b <= a for a, b in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError(f"block end times must be non-negative and strictly increasing, got {self.boundaries}")

    @property
    def horizon(self) -> int:
        return self.boundaries[-1]

    @property
    def blocks(self) -> tuple[Block, ...]:
        starts = (0, *(b + 1 for b in self.boundaries[:-1]))
        return tuple(zip(starts, self.boundaries, strict=True))

    def __len__(self) -> int:
        return len(self.boundaries)


def block_scheme(horizon: int, n_blocks: int) -> BlockScheme:
    """
    Partition 0..T into N blocks with end times round(m T / N).

    For T=100, N=10 this gives [0,10], [11,20], ..., [91,100].
    """
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon}")
    if not 1 <= n_blocks <= horizon + 1:
        raise ValueError(f"number of blocks must be in 1..{horizon + 1}, got {n_blocks}")
    if n_blocks == horizon + 1:
        return BlockScheme(tuple(range(horizon + 1)))
    # round half up keeps ends strictly increasing whenever N <= T
    ends = tuple(int(np.floor(m * horizon / n_blocks + 0.5)) for m in range(1, n_blocks + 1))
    return BlockScheme(ends)


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-ascent settings; `restarts` counts every start, the first one unperturbed."""

    max_iters: int = DEFAULT_MAX_ITERS
    restarts: int = DEFAULT_RESTARTS
    init_step: float = DEFAULT_INIT_STEP
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1:
            raise ConfigError(f"max_iters and restarts must be >= 1, got {self.max_iters}, {self.restarts}")
        if not (self.init_step > 0 and self.convergence_tol > 0):
            raise ConfigError(
                f"init_step and convergence_tol must be positive, got {self.init_step}, {self.convergence_tol}"
            )

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], **overrides) -> OptimizerConfig:
        values = {
            "max_iters": parse_int(mapping, "max_iters", DEFAULT_MAX_ITERS),
            "restarts": parse_int(mapping, "restarts", DEFAULT_RESTARTS),
            "init_step": parse_float(mapping, "init_step", DEFAULT_INIT_STEP),
            "convergence_tol": parse_float(mapping, "convergence_tol", DEFAULT_CONVERGENCE_TOL),
            "seed": parse_int(mapping, "seed", 0),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class BlockObjective:
    """
    L^m(theta) for one block, with the input distances computed once.

    Under a uniform or custom weight every t in the block shares one Gram matrix; under a
    time-varying causal box each t has its own.
    """

    def __init__(self, X_d: FloatArray, Y_d: FloatArray, block: Block, w: TimeWeight):
        start, end = block
        n_times = X_d.shape[2]
        if not 0 <= start <= end < n_times:
            raise ValueError(f"block {block} outside 0..{n_times - 1}")
        if Y_d.shape != (X_d.shape[0], n_times):
            raise ValueError(f"targets of shape {Y_d.shape} do not match inputs {X_d.shape}")
        self.block = block
        self.targets = np.ascontiguousarray(Y_d[:, start : end + 1])
        self.time_varying = w.is_time_varying
        if self.time_varying:
            self.distances = causal_sq_dists(X_d, X_d, range(start, end + 1))
        else:
            self.distances = pairwise_sq_dists(X_d, X_d, w.vector(n_times))
        self.n_evals = 0

    def __call__(self, theta: Hyperparameters, want_grad: bool = True) -> LmlValue:
        self.n_evals += 1
        if not self.time_varying:
            return lml_from_distances(self.distances, self.targets, theta, want_grad)
        value = 0.0
        grad = np.zeros(theta.n_params) if want_grad else None
        for i in range(self.targets.shape[1]):
            term = lml_from_distances(self.distances[i], self.targets[:, i], theta, want_grad)
            value += term.value
            if grad is not None:
                grad += term.gradient
        return LmlValue(value=value, gradient=grad)

    def alpha(self, theta: Hyperparameters) -> FloatArray:
        """(K + sigma^2 I)^{-1} Y^t for each t of the block, shape (len, n_ob)."""
        if not self.time_varying:
            fac = factorize(kernel_from_distances(self.distances, theta), theta.noise_std, theta.jitter)
            return fac.solve(self.targets).T
        columns = []
        for i in range(self.targets.shape[1]):
            fac = factorize(kernel_from_distances(self.distances[i], theta), theta.noise_std, theta.jitter)
            columns.append(fac.solve(self.targets[:, i]))
        return np.array(columns)


def block_lml(X_d: FloatArray, Y_d: FloatArray, block: Block, theta: Hyperparameters, w: TimeWeight) -> LmlValue:
    """Sum over t in the block of the log marginal likelihood of Y^t, with gradient."""
    return BlockObjective(as_input_tensor(X_d), np.asarray(Y_d, dtype=np.float64), block, w)(theta)


@dataclass(frozen=True)
class InitResult:
    theta: Hyperparameters
    degenerate: bool = False


def init_hyperparameters(X_d: FloatArray, Y_d: FloatArray, block: Block) -> InitResult:
    """
    Median-heuristic starting point.

    l_k is the median pairwise channel distance (1.0 if zero), tau^2 the variance of the block's
    targets (1.0 if zero) and sigma^2 = 0.1 tau^2. Identical inputs fall back to l_k = 1,
    tau^2 = 1, sigma^2 = 0.1 and are reported as degenerate.
    """
    X_d = as_input_tensor(X_d)
    Y_d = np.asarray(Y_d, dtype=np.float64)
    n_ob, n_channels, n_times = X_d.shape
    if n_ob < 2:
        raise ValueError(f"initialization needs at least 2 landings, got {n_ob}")
    start, end = block

    D = pairwise_sq_dists(X_d, X_d, np.ones(n_times))
    upper = np.triu_indices(n_ob, k=1)
    medians = np.array([np.median(D[k][upper]) for k in range(n_channels)])
    if np.all(D[:, upper[0], upper[1]] == 0):
        logger.warning(f"block {block}: all training inputs identical, using fallback hyperparameters")
        return InitResult(
            Hyperparameters(
                noise_std=np.sqrt(INIT_NOISE_RATIO), amplitude=1.0, length_scales=(1.0,) * n_channels
            ),
            degenerate=True,
        )
    length_scales = tuple(float(m) if m > 0 else 1.0 for m in medians)

    variance = float(np.var(Y_d[:, start : end + 1]))
    if not variance > 0:
        variance = 1.0
    theta = Hyperparameters(
        noise_std=np.sqrt(INIT_NOISE_RATIO * variance),
        amplitude=np.sqrt(variance),
        length_scales=length_scales,
    )
    return InitResult(theta)


@dataclass(frozen=True)
class AscentTrace:
    log_theta: FloatArray
    value: float
    init_value: float
    iterations: int
    history: tuple[float, ...] = ()


def _safe_eval(objective: BlockObjective, log_theta: FloatArray) -> LmlValue:
    try:
        result = objective(Hyperparameters.from_log_vector(log_theta))
    except (FactorizationError, ValueError):
        return LmlValue(value=-np.inf)
    if not np.isfinite(result.value) or result.gradient is None or not np.all(np.isfinite(result.gradient)):
        return LmlValue(value=-np.inf)
    return result


def gradient_ascent(objective: BlockObjective, log_theta0: FloatArray, cfg: OptimizerConfig) -> AscentTrace:
    """
    Normalized-gradient ascent in log space with backtracking.

    A step is accepted only if it strictly increases the objective, so accepted values are
    non-decreasing. The step doubles after each acceptance and halves on rejection, at most
    MAX_STEP_HALVINGS times per iteration.
    """
    low, high = LOG_PARAM_BOUNDS
    x = np.clip(np.asarray(log_theta0, dtype=np.float64), low, high)
    current = _safe_eval(objective, x)
    init_value = current.value
    history = [current.value]
    step = cfg.init_step
    iterations = 0
    if current.gradient is None:
        return AscentTrace(
            log_theta=x, value=current.value, init_value=init_value, iterations=0, history=tuple(history)
        )

    for iterations in range(1, cfg.max_iters + 1):
        norm = float(np.linalg.norm(current.gradient))
        if norm == 0.0:
            break
        direction = current.gradient / norm
        trial_step = step
        accepted: tuple[FloatArray, LmlValue] | None = None
        for _ in range(MAX_STEP_HALVINGS + 1):
            candidate = np.clip(x + trial_step * direction, low, high)
            trial = _safe_eval(objective, candidate)
            if trial.value > current.value:
                accepted = (candidate, trial)
                break
            trial_step *= 0.5
        if accepted is None:
            break
        previous = current.value
        x, current = accepted
        history.append(current.value)
        step = 2.0 * trial_step
        if abs(current.value - previous) <= cfg.convergence_tol * max(1.0, abs(previous)):
            break

    return AscentTrace(
        log_theta=x, value=current.value, init_value=init_value, iterations=iterations, history=tuple(history)
    )


def _finite_or_none(value: float) -> float | None:
    """JSON has no infinities; diverged restarts are written as null."""
    return float(value) if np.isfinite(value) else None


@dataclass(frozen=True)
class BlockFit:
    """Outcome of fitting one block; `improved` is False when no restart beat its starting point."""

    block: Block
    theta: Hyperparameters
    lml: float
    init_lml: float
    iterations: int
    improved: bool
    degenerate_init: bool = False

    def to_dict(self) -> dict:
        return {
            "block": list(self.block),
            "lml": _finite_or_none(self.lml),
            "init_lml": _finite_or_none(self.init_lml),
            "iterations": self.iterations,
            "improved": self.improved,
            "degenerate_init": self.degenerate_init,
        }


def _restart_starts(theta0: Hyperparameters, block: Block, cfg: OptimizerConfig) -> list[FloatArray]:
    rng = np.random.default_rng(derive_seed(cfg.seed, "restart", *block))
    low, high = np.log(RESTART_FACTOR_RANGE)
    base = theta0.to_log_vector()
    starts = [base]
    for _ in range(cfg.restarts - 1):
        starts.append(base + rng.uniform(low, high, size=base.size))
    return starts


def fit_block_objective(objective: BlockObjective, init: InitResult, cfg: OptimizerConfig) -> BlockFit:
    block = objective.block
    traces = [gradient_ascent(objective, start, cfg) for start in _restart_starts(init.theta, block, cfg)]
    improved = [trace for trace in traces if trace.value > trace.init_value]
    if not improved:
        logger.warning(f"block {block}: no restart improved on its initialization, keeping the initial theta")
        return BlockFit(
            block=block,
            theta=init.theta,
            lml=traces[0].init_value,
            init_lml=traces[0].init_value,
            iterations=sum(trace.iterations for trace in traces),
            improved=False,
            degenerate_init=init.degenerate,
        )
    # max() keeps the earliest restart on ties
    best = max(improved, key=lambda trace: trace.value)
    return BlockFit(
        block=block,
        theta=Hyperparameters.from_log_vector(best.log_theta),
        lml=best.value,
        init_lml=traces[0].init_value,
        iterations=sum(trace.iterations for trace in traces),
        improved=True,
        degenerate_init=init.degenerate,
    )


def fit_block(
    X_d: FloatArray,
    Y_d: FloatArray,
    block: Block,
    cfg: OptimizerConfig,
    w: TimeWeight,
) -> BlockFit:
    """Best theta across restarts for one block; deterministic given cfg.seed."""
    X_d = as_input_tensor(X_d)
    Y_d = np.asarray(Y_d, dtype=np.float64)
    objective = BlockObjective(X_d, Y_d, block, w)
    return fit_block_objective(objective, init_hyperparameters(X_d, Y_d, block), cfg)


def fit_model(
    db: FlightDatabase,
    scheme: BlockScheme,
    cfg: OptimizerConfig,
    w: TimeWeight | None = None,
    *,
    standardize: bool = False,
    threads: int = 1,
) -> GpModel:
    """
    Fit every block of `scheme` on the landings of `db`, then precompute alpha^t for all t.

    Blocks are fitted independently on a thread pool; the resulting model does not depend on
    the number of threads.
    """
    w = w or TimeWeight.uniform()
    if db.n_ob == 0:
        raise ValueError("cannot fit a model on an empty database")
    if not db.has_targets:
        raise ValueError("every training landing needs a decel_force profile")
    if scheme.horizon != db.horizon:
        raise ValueError(f"block scheme ends at {scheme.horizon}, database horizon is {db.horizon}")
    start_time = time.perf_counter()

    X_raw = db.inputs()
    Y = db.targets()
    scaler = ChannelScaler.fit(X_raw) if standardize else None
    X = X_raw if scaler is None else scaler.transform(X_raw)

    def fit_one(block: Block) -> tuple[BlockFit, FloatArray]:
        block_start = time.perf_counter()
        objective = BlockObjective(X, Y, block, w)
        fit = fit_block_objective(objective, init_hyperparameters(X, Y, block), cfg)
        alpha = objective.alpha(fit.theta)
        logger.debug(
            f"block {block}: lml {fit.init_lml:.6g} -> {fit.lml:.6g} after {fit.iterations} iterations "
            f"({objective.n_evals} evaluations, {time.perf_counter() - block_start:.2f}s)"
        )
        return fit, alpha

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(fit_one, scheme.blocks))

    alpha = np.vstack([block_alpha for _, block_alpha in results])
    fits = [fit for fit, _ in results]
    model = GpModel(
        horizon=db.horizon,
        blocks=scheme.blocks,
        thetas=tuple(fit.theta for fit in fits),
        train_ids=tuple(db.ids),
        train_inputs=X_raw,
        alpha=alpha,
        data_digest=database_digest(db),
        weight=w,
        scaler=scaler,
        diagnostics=tuple(fit.to_dict() for fit in fits),
    )
    n_flagged = sum(not fit.improved for fit in fits)
    logger.info(
        f"Fitted GP on {db.n_ob} landings, {len(scheme)} block(s), weight={w.mode}"
        f"{f', {n_flagged} block(s) not improved' if n_flagged else ''} in {time.perf_counter() - start_time:.2f}s"
    )
    return model
