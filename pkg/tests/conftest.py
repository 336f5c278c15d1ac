import numpy as np
import pytest

from landing_gp.dataset import FlightDatabase, GeneratorConfig, Landing, generate_synthetic
from landing_gp.gp import Hyperparameters


def random_inputs(rng: np.random.Generator, n: int, horizon: int, n_channels: int = 6) -> np.ndarray:
    """Standard-normal (n, channels, T+1) input tensor."""
    return rng.standard_normal((n, n_channels, horizon + 1))


def random_theta(rng: np.random.Generator, horizon: int, n_channels: int = 6) -> Hyperparameters:
    """Hyperparameters on the scale of standard-normal inputs (squared distances ~ 2 (T+1))."""
    base = 2.0 * (horizon + 1)
    return Hyperparameters(
        noise_std=rng.uniform(0.1, 0.5),
        amplitude=rng.uniform(0.5, 2.0),
        length_scales=tuple(base * rng.uniform(0.5, 2.0, size=n_channels)),
    )


def make_landing(landing_id: int, horizon: int = 4, scale: float = 1.0, target: bool = True) -> Landing:
    times = np.arange(horizon + 1, dtype=np.float64)
    speed = scale * (50.0 - 2.0 * times)
    return Landing.from_signals(
        id=landing_id,
        mass=1000.0 * scale,
        speed=speed,
        reverse_throttle=np.full(horizon + 1, 0.5),
        brake_angle=np.linspace(0.0, 1.0, horizon + 1),
        drag=3.0 * speed**2,
        decel_force=2000.0 * scale + times if target else None,
    )


def database_from_arrays(X: np.ndarray, Y: np.ndarray | None = None) -> FlightDatabase:
    """Wrap an (n, 6, T+1) tensor (mass and kinetic energy read at t=0) and optional targets as landings."""
    landings = [
        Landing(
            id=i,
            mass=X[i, 0, 0],
            kinetic_energy=X[i, 1, 0],
            speed=X[i, 2],
            thrust=X[i, 3],
            brake=X[i, 4],
            drag=X[i, 5],
            decel_force=None if Y is None else Y[i],
        )
        for i in range(X.shape[0])
    ]
    return FlightDatabase(horizon=X.shape[2] - 1, landings=tuple(landings))


def scalar_inputs(rng: np.random.Generator, n: int, horizon: int) -> np.ndarray:
    """Random inputs whose mass and kinetic energy rows are constant in time, mass positive."""
    X = random_inputs(rng, n, horizon)
    X[:, 0, :] = rng.uniform(1.0, 3.0, size=(n, 1))
    X[:, 1, :] = rng.standard_normal((n, 1))
    return X


def synthetic_db(n: int, seed: int, horizon: int = 10, **kwargs) -> FlightDatabase:
    return generate_synthetic(GeneratorConfig(n_landings=n, seed=seed, horizon=horizon, **kwargs))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_db():
    """Twelve synthetic landings over ten seconds."""
    return synthetic_db(12, seed=3)


@pytest.fixture
def tiny_db():
    """Three hand-built landings over four seconds."""
    return FlightDatabase.from_landings([make_landing(i, scale=1.0 + 0.1 * i) for i in range(3)])


@pytest.fixture
def gp_problem(rng):
    """A random GP regression problem: 6 landings, T=3, one target column per time."""
    horizon = 3
    X = random_inputs(rng, 6, horizon)
    Y = rng.standard_normal((6, horizon + 1))
    return X, Y, random_theta(rng, horizon)
