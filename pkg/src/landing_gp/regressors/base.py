import abc
from enum import StrEnum

import numpy as np

from ..dataset import FlightDatabase
from ..gp import HorizonMismatchError
from ..gp.kernel import FloatArray


class NotFittedError(RuntimeError):
    pass


class Regressor(abc.ABC):
    """Maps landing inputs to predicted decel_force profiles of shape (n_test, T+1)."""

    #: Short name used in reports (e.g. "gp", "lr", "rf")
    label: str = "regressor"

    def __init__(self):
        self._horizon: int | None = None

    @property
    def is_fitted(self) -> bool:
        return self._horizon is not None

    @property
    def horizon(self) -> int:
        if self._horizon is None:
            raise NotFittedError(f"{type(self).__name__} has not been fitted")
        return self._horizon

    def fit(self, db: FlightDatabase) -> "Regressor":
        """Fit on every landing of `db`; all of them must carry a decel_force profile.

        Args:
            db: Training landings.

        Returns:
            The fitted regressor itself.
        """
        if db.n_ob == 0:
            raise ValueError(f"{self.label}: cannot fit on an empty database")
        self._fit(db.inputs(), db.targets(), db)
        self._horizon = db.horizon
        return self

    def predict(self, db: FlightDatabase) -> FloatArray:
        """Predict profiles for the landings of `db` (targets, if any, are ignored).

        Returns:
            Array of shape (n_test, T+1), rows in the order of `db`.
        """
        horizon = self.horizon
        if db.horizon != horizon:
            raise HorizonMismatchError(f"{self.label} was fitted with T={horizon}, inputs have T={db.horizon}")
        if db.n_ob == 0:
            return np.empty((0, horizon + 1))
        return self._predict(db.inputs(), db)

    @abc.abstractmethod
    def _fit(self, X: FloatArray, Y: FloatArray, db: FlightDatabase) -> None:
        """Fit on inputs X (n, 6, T+1) and targets Y (n, T+1)."""

    @abc.abstractmethod
    def _predict(self, X: FloatArray, db: FlightDatabase) -> FloatArray:
        pass

    def describe(self) -> dict:
        """Settings echoed into reports."""
        return {"model": self.label}


class FeatureMode(StrEnum):
    PER_T = "per-t"
    FULL = "full"


def design_matrix(X: FloatArray, t: int | None) -> FloatArray:
    """
    Baseline design rows.

    With `t` the 7-column per-time design [1, m, e, v^t, p^t, b^t, delta^t] is returned;
    with t=None the full trajectory is used: intercept, the two scalars and all 4 (T+1)
    time-channel values.
    """
    n = X.shape[0]
    if t is None:
        return np.hstack([np.ones((n, 1)), X[:, :2, 0], X[:, 2:, :].reshape(n, -1)])
    return np.hstack([np.ones((n, 1)), X[:, :, t]])
