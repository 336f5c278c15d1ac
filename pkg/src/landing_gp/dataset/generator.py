"""
Physics-informed synthetic landings.

Each landing integrates the ground roll with a one-second explicit step

    v^{t+1} = v^t - (gamma^t / m) * dt,
    gamma^t = c_d (v^t)^2 + c_b v^t angle^t + c_r (v^t)^2 throttle^t,

capped at m v^t / dt so the aircraft never rolls backwards. Units: mass in kg, speed in m/s,
forces in N; brake lever angle and reverse-throttle level are unitless in [0, 1], so the thrust
channel is in m^2/s^2 and the brake channel in m/s. The drag channel is the drag force c_d v^2.

Recorded speed carries gaussian noise of std `noise_std` (m/s) and the recorded deceleration
force carries gaussian noise of std `noise_std * mass` (N), i.e. `noise_std` m/s^2 of
deceleration. The derived channels (kinetic energy, thrust, brake, drag) are computed from the
noisy recorded speed, so the recorded speed derivative does not match the recorded force.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Mapping
from dataclasses import dataclass, fields
from enum import StrEnum

import numpy as np

from ..config import ConfigError, parse_float, parse_int, parse_range
from ..constants import (
    DEFAULT_BRAKE_COEF_RANGE,
    DEFAULT_DRAG_COEF_RANGE,
    DEFAULT_HORIZON,
    DEFAULT_MASS_RANGE_KG,
    DEFAULT_NOISE_STD,
    DEFAULT_REGIME_CHANGE_TIME,
    DEFAULT_REVERSE_COEF_RANGE,
    DEFAULT_V0_RANGE_MS,
    TIME_STEP_S,
)
from .models import FlightDatabase, Landing

logger = logging.getLogger(__name__)

UINT64_MAX = 2**64 - 1


class BrakeProfile(StrEnum):
    RAMP = "ramp"
    STEP = "step"
    REGIME_CHANGE = "regime_change"


class ThrottleProfile(StrEnum):
    EARLY_STOW = "early_stow"
    CONSTANT = "constant"
    NONE = "none"


@dataclass(frozen=True)
class GeneratorConfig:
    n_landings: int
    seed: int = 0
    horizon: int = DEFAULT_HORIZON
    mass_range: tuple[float, float] = DEFAULT_MASS_RANGE_KG
    v0_range: tuple[float, float] = DEFAULT_V0_RANGE_MS
    drag_coef_range: tuple[float, float] = DEFAULT_DRAG_COEF_RANGE
    brake_coef_range: tuple[float, float] = DEFAULT_BRAKE_COEF_RANGE
    reverse_coef_range: tuple[float, float] = DEFAULT_REVERSE_COEF_RANGE
    brake_profile_family: BrakeProfile = BrakeProfile.RAMP
    throttle_profile_family: ThrottleProfile = ThrottleProfile.EARLY_STOW
    noise_std: float = DEFAULT_NOISE_STD
    brake_efficiency: float = 1.0
    regime_change_time: int = DEFAULT_REGIME_CHANGE_TIME
    first_id: int = 0

    def __post_init__(self):
        if self.n_landings < 1:
            raise ConfigError(f"n_landings must be positive, got {self.n_landings}")
        if not 0 <= self.seed <= UINT64_MAX:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be at least 1, got {self.horizon}")
        for name in ("mass_range", "v0_range", "drag_coef_range", "brake_coef_range", "reverse_coef_range"):
            low, high = getattr(self, name)
            if not low < high:
                raise ConfigError(f"{name} must satisfy low < high, got ({low}, {high})")
        for name in ("mass_range", "v0_range", "drag_coef_range", "brake_coef_range", "reverse_coef_range"):
            if getattr(self, name)[0] <= 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.noise_std < 0:
            raise ConfigError(f"noise_std must be non-negative, got {self.noise_std}")
        if self.brake_efficiency <= 0:
            raise ConfigError(f"brake_efficiency must be positive, got {self.brake_efficiency}")
        if self.first_id < 0:
            raise ConfigError(f"first_id must be non-negative, got {self.first_id}")
        try:
            object.__setattr__(self, "brake_profile_family", BrakeProfile(self.brake_profile_family))
            object.__setattr__(self, "throttle_profile_family", ThrottleProfile(self.throttle_profile_family))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], **overrides) -> GeneratorConfig:
        """Build from a flat config mapping; keyword overrides (e.g. CLI flags) win when not None."""
        values: dict[str, object] = {
            "n_landings": parse_int(mapping, "n_landings", 100),
            "seed": parse_int(mapping, "seed", 0),
            "horizon": parse_int(mapping, "horizon", DEFAULT_HORIZON),
            "mass_range": parse_range(mapping, "mass_range", DEFAULT_MASS_RANGE_KG),
            "v0_range": parse_range(mapping, "v0_range", DEFAULT_V0_RANGE_MS),
            "drag_coef_range": parse_range(mapping, "drag_coef_range", DEFAULT_DRAG_COEF_RANGE),
            "brake_coef_range": parse_range(mapping, "brake_coef_range", DEFAULT_BRAKE_COEF_RANGE),
            "reverse_coef_range": parse_range(mapping, "reverse_coef_range", DEFAULT_REVERSE_COEF_RANGE),
            "brake_profile_family": mapping.get("brake_profile_family", BrakeProfile.RAMP),
            "throttle_profile_family": mapping.get("throttle_profile_family", ThrottleProfile.EARLY_STOW),
            "noise_std": parse_float(mapping, "noise_std", DEFAULT_NOISE_STD),
            "brake_efficiency": parse_float(mapping, "brake_efficiency", 1.0),
            "regime_change_time": parse_int(mapping, "regime_change_time", DEFAULT_REGIME_CHANGE_TIME),
            "first_id": parse_int(mapping, "first_id", 0),
        }
        known = {f.name for f in fields(cls)}
        values.update({k: v for k, v in overrides.items() if v is not None and k in known})
        return cls(**values)  # type: ignore[arg-type]


@dataclass(frozen=True)
class LandingCoefficients:
    mass: float
    v0: float
    drag: float
    brake: float
    reverse: float


def _log_uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    low, high = bounds
    return float(np.exp(rng.uniform(np.log(low), np.log(high))))


def _brake_angle(cfg: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    times = np.arange(cfg.horizon + 1, dtype=np.float64)
    a_max = rng.uniform(0.5, 1.0)
    ramp_s = rng.uniform(2.0, 8.0)
    match cfg.brake_profile_family:
        case BrakeProfile.RAMP:
            return a_max * np.minimum(1.0, times / ramp_s)
        case BrakeProfile.STEP:
            return np.where(times >= np.ceil(ramp_s / 2.0), a_max, 0.0)
        case BrakeProfile.REGIME_CHANGE:
            late_level = rng.uniform(0.1, 1.0)
            angle = a_max * np.minimum(1.0, times / ramp_s)
            return np.where(times >= cfg.regime_change_time, late_level, angle)
    raise ConfigError(f"unknown brake profile {cfg.brake_profile_family}")


def _throttle_level(cfg: GeneratorConfig, rng: np.random.Generator) -> tuple[float, float]:
    """(level, stow speed); the aircraft stows reverse thrust below the stow speed for `early_stow`."""
    level = rng.uniform(0.5, 1.0)
    stow_speed = rng.uniform(25.0, 35.0)
    match cfg.throttle_profile_family:
        case ThrottleProfile.EARLY_STOW:
            return level, stow_speed
        case ThrottleProfile.CONSTANT:
            return level, 0.0
        case ThrottleProfile.NONE:
            return 0.0, 0.0
    raise ConfigError(f"unknown throttle profile {cfg.throttle_profile_family}")


def simulate_ground_roll(
    coefs: LandingCoefficients,
    brake_angle: np.ndarray,
    throttle_level: float,
    stow_speed: float,
    dt: float = TIME_STEP_S,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the ground roll; returns true (speed, throttle, decel_force) on the 0..T grid."""
    n_times = brake_angle.size
    speed = np.empty(n_times)
    throttle = np.empty(n_times)
    force = np.empty(n_times)
    speed[0] = coefs.v0
    for t in range(n_times):
        v = speed[t]
        throttle[t] = throttle_level if v > stow_speed else 0.0
        raw = coefs.drag * v**2 + coefs.brake * v * brake_angle[t] + coefs.reverse * v**2 * throttle[t]
        force[t] = min(raw, coefs.mass * v / dt)
        if t + 1 < n_times:
            speed[t + 1] = v - force[t] / coefs.mass * dt
    return speed, throttle, force


def generate_landing(cfg: GeneratorConfig, landing_id: int, rng: np.random.Generator) -> Landing:
    coefs = LandingCoefficients(
        mass=rng.uniform(*cfg.mass_range),
        v0=rng.uniform(*cfg.v0_range),
        drag=_log_uniform(rng, cfg.drag_coef_range),
        brake=_log_uniform(rng, cfg.brake_coef_range) * cfg.brake_efficiency,
        reverse=_log_uniform(rng, cfg.reverse_coef_range),
    )
    angle = _brake_angle(cfg, rng)
    level, stow_speed = _throttle_level(cfg, rng)
    speed, throttle, force = simulate_ground_roll(coefs, angle, level, stow_speed)

    n_times = cfg.horizon + 1
    recorded_speed = speed + rng.normal(0.0, cfg.noise_std, n_times)
    recorded_force = force + rng.normal(0.0, cfg.noise_std * coefs.mass, n_times)
    return Landing.from_signals(
        id=landing_id,
        mass=coefs.mass,
        speed=recorded_speed,
        reverse_throttle=throttle,
        brake_angle=angle,
        drag=coefs.drag * recorded_speed**2,
        decel_force=recorded_force,
    )


def generate_synthetic(cfg: GeneratorConfig) -> FlightDatabase:
    """
    Deterministic synthetic database: a pure function of `cfg`.

    Landing i draws from its own child stream of ``SeedSequence(cfg.seed)``, so the first k
    landings do not depend on how many landings are requested.
    """
    start_time = time.perf_counter()
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.n_landings)
    landings = [
        generate_landing(cfg, cfg.first_id + i, np.random.default_rng(stream)) for i, stream in enumerate(streams)
    ]
    db = FlightDatabase(horizon=cfg.horizon, landings=tuple(landings))
    logger.info(
        f"Generated {db.n_ob} synthetic landings (T={cfg.horizon}, brake={cfg.brake_profile_family}, "
        f"throttle={cfg.throttle_profile_family}) in {time.perf_counter() - start_time:.2f}s"
    )
    return db
