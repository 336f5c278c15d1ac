from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..constants import CHANNEL_NAMES, N_CHANNELS

FloatArray = npt.NDArray[np.float64]

KINETIC_ENERGY_RTOL = 1e-9


class DatasetSchemaError(ValueError):
    """Raised when landing data violates the data model; `row` is the 1-based file line when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


def _frozen_vector(name: str, values, landing_id: int) -> FloatArray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1 or arr.size == 0:
        raise DatasetSchemaError(f"landing {landing_id}: {name} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise DatasetSchemaError(f"landing {landing_id}: {name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Landing:
    """
    One recorded landing: two scalars and four time channels sampled once per second.

    Channels (all on the same 0..T grid):
        speed: recorded ground speed v^t (m/s)
        thrust: (v^t)^2 times the reverse-throttle level
        brake: v^t times the brake-lever angle
        drag: aerodynamic drag, a function of (v^t)^2 (N)
        decel_force: deceleration times mass (N); None on prediction-only inputs
    """

    id: int
    mass: float
    kinetic_energy: float
    speed: FloatArray
    thrust: FloatArray
    brake: FloatArray
    drag: FloatArray
    decel_force: FloatArray | None = None

    def __post_init__(self):
        if self.id < 0:
            raise DatasetSchemaError(f"landing id must be non-negative, got {self.id}")
        for name in ("mass", "kinetic_energy"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise DatasetSchemaError(f"landing {self.id}: {name} is not finite")
            object.__setattr__(self, name, value)
        if self.mass <= 0:
            raise DatasetSchemaError(f"landing {self.id}: mass must be positive, got {self.mass}")

        for name in ("speed", "thrust", "brake", "drag"):
            object.__setattr__(self, name, _frozen_vector(name, getattr(self, name), self.id))
        if self.decel_force is not None:
            object.__setattr__(self, "decel_force", _frozen_vector("decel_force", self.decel_force, self.id))

        lengths = {self.speed.size, self.thrust.size, self.brake.size, self.drag.size}
        if self.decel_force is not None:
            lengths.add(self.decel_force.size)
        if len(lengths) != 1:
            raise DatasetSchemaError(f"landing {self.id}: time channels have different lengths {sorted(lengths)}")

    @classmethod
    def from_signals(
        cls,
        id: int,  # noqa: A002
        mass: float,
        speed,
        reverse_throttle,
        brake_angle,
        drag,
        decel_force=None,
    ) -> Landing:
        """Build a landing from raw recorded signals, deriving e, p and b from their definitions."""
        speed = np.asarray(speed, dtype=np.float64)
        return cls(
            id=id,
            mass=mass,
            kinetic_energy=0.5 * mass * speed[0] ** 2,
            speed=speed,
            thrust=speed**2 * np.asarray(reverse_throttle, dtype=np.float64),
            brake=speed * np.asarray(brake_angle, dtype=np.float64),
            drag=drag,
            decel_force=decel_force,
        )

    @property
    def horizon(self) -> int:
        return self.speed.size - 1

    @property
    def has_target(self) -> bool:
        return self.decel_force is not None

    def kinetic_energy_consistent(self, rtol: float = KINETIC_ENERGY_RTOL) -> bool:
        expected = 0.5 * self.mass * self.speed[0] ** 2
        return abs(self.kinetic_energy - expected) <= rtol * max(abs(expected), abs(self.kinetic_energy))

    def inputs(self) -> FloatArray:
        """The (6, T+1) input block: mass and kinetic energy held constant over time, then the four channels."""
        shape = (self.horizon + 1,)
        channels = [np.asarray(getattr(self, name), dtype=np.float64) for name in CHANNEL_NAMES]
        return np.stack([np.broadcast_to(channel, shape) for channel in channels])

    def without_target(self) -> Landing:
        return Landing(
            id=self.id,
            mass=self.mass,
            kinetic_energy=self.kinetic_energy,
            speed=self.speed,
            thrust=self.thrust,
            brake=self.brake,
            drag=self.drag,
        )

    def with_target(self, decel_force) -> Landing:
        return Landing(
            id=self.id,
            mass=self.mass,
            kinetic_energy=self.kinetic_energy,
            speed=self.speed,
            thrust=self.thrust,
            brake=self.brake,
            drag=self.drag,
            decel_force=decel_force,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Landing):
            return NotImplemented
        if (self.id, self.mass, self.kinetic_energy) != (other.id, other.mass, other.kinetic_energy):
            return False
        if (self.decel_force is None) != (other.decel_force is None):
            return False
        pairs = [
            (self.speed, other.speed),
            (self.thrust, other.thrust),
            (self.brake, other.brake),
            (self.drag, other.drag),
        ]
        if self.decel_force is not None and other.decel_force is not None:
            pairs.append((self.decel_force, other.decel_force))
        return all(np.array_equal(a, b) for a, b in pairs)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class FlightDatabase:
    """Ordered, immutable collection of landings sharing one horizon T."""

    horizon: int
    landings: tuple[Landing, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "landings", tuple(self.landings))
        if self.horizon < 0:
            raise DatasetSchemaError(f"horizon must be non-negative, got {self.horizon}")
        for landing in self.landings:
            if landing.horizon != self.horizon:
                raise DatasetSchemaError(
                    f"landing {landing.id} has horizon {landing.horizon}, database horizon is {self.horizon}"
                )
        ids = [landing.id for landing in self.landings]
        if len(set(ids)) != len(ids):
            raise DatasetSchemaError("landing ids must be unique")

    @classmethod
    def from_landings(cls, landings: Sequence[Landing]) -> FlightDatabase:
        if not landings:
            raise DatasetSchemaError("cannot infer a horizon from zero landings")
        return cls(horizon=landings[0].horizon, landings=tuple(landings))

    @property
    def n_ob(self) -> int:
        return len(self.landings)

    @property
    def ids(self) -> list[int]:
        return [landing.id for landing in self.landings]

    @property
    def has_targets(self) -> bool:
        return all(landing.has_target for landing in self.landings)

    def __len__(self) -> int:
        return len(self.landings)

    def __iter__(self) -> Iterator[Landing]:
        return iter(self.landings)

    def __getitem__(self, index: int) -> Landing:
        return self.landings[index]

    def subset(self, indices: Sequence[int]) -> FlightDatabase:
        """Landings at the given 0-based positions, in the given order."""
        return FlightDatabase(horizon=self.horizon, landings=tuple(self.landings[i] for i in indices))

    def inputs(self) -> FloatArray:
        """Input tensor of shape (n_ob, 6, T+1)."""
        if not self.landings:
            return np.empty((0, N_CHANNELS, self.horizon + 1))
        return np.stack([landing.inputs() for landing in self.landings])

    def targets(self) -> FloatArray:
        """Deceleration-force matrix of shape (n_ob, T+1)."""
        missing = [landing.id for landing in self.landings if landing.decel_force is None]
        if missing:
            raise DatasetSchemaError(f"landings without decel_force: {missing[:5]}")
        if not self.landings:
            return np.empty((0, self.horizon + 1))
        return np.stack([landing.decel_force for landing in self.landings])  # type: ignore[misc]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlightDatabase):
            return NotImplemented
        return self.horizon == other.horizon and self.landings == other.landings

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class FoldPlan:
    """M pairwise-disjoint, equally sized test sets of 0-based landing positions."""

    folds: tuple[tuple[int, ...], ...]
    n_ob: int

    def __post_init__(self):
        seen: set[int] = set()
        sizes = {len(fold) for fold in self.folds}
        if len(sizes) > 1:
            raise ValueError(f"fold sizes differ: {sorted(sizes)}")
        for fold in self.folds:
            for index in fold:
                if not 0 <= index < self.n_ob:
                    raise ValueError(f"fold index {index} outside 0..{self.n_ob - 1}")
                if index in seen:
                    raise ValueError(f"index {index} appears in more than one fold")
                seen.add(index)

    @property
    def n_folds(self) -> int:
        return len(self.folds)

    @property
    def n_test(self) -> int:
        return len(self.folds[0]) if self.folds else 0

    def train_indices(self, fold: int) -> list[int]:
        """Complement of fold `fold`; uncovered indices are always part of training."""
        held_out = set(self.folds[fold])
        return [i for i in range(self.n_ob) if i not in held_out]

    def uncovered(self) -> list[int]:
        covered = {i for fold in self.folds for i in fold}
        return [i for i in range(self.n_ob) if i not in covered]
