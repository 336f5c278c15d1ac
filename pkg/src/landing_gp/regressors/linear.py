import logging

import numpy as np
import scipy.linalg

from ..dataset import FlightDatabase
from ..gp.kernel import FloatArray
from .base import FeatureMode, NotFittedError, Regressor, design_matrix

logger = logging.getLogger(__name__)


def least_squares(A: FloatArray, y: FloatArray) -> tuple[FloatArray, int]:
    """
    Minimum-norm least squares via SVD, with columns scaled to unit max-abs first.

    Returns the coefficients in the original column units and the numerical rank.
    """
    scale = np.max(np.abs(A), axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    solution, _, rank, _ = scipy.linalg.lstsq(A / scale, y, lapack_driver="gelsd")
    if solution.ndim == 1:
        return solution / scale, int(rank)
    return solution / scale[:, None], int(rank)


class LinearRegressor(Regressor):
    """Ordinary least squares of decel_force^t on [1, m, e, v^t, p^t, b^t, delta^t], one fit per t."""

    label = "lr"

    def __init__(self, features: FeatureMode | str = FeatureMode.PER_T):
        super().__init__()
        self.features = FeatureMode(features)
        self.coefficients: FloatArray | None = None
        self.rank_deficient: tuple[int, ...] = ()

    def _fit(self, X: FloatArray, Y: FloatArray, db: FlightDatabase) -> None:
        n_times = Y.shape[1]
        if self.features == FeatureMode.FULL:
            A = design_matrix(X, None)
            solution, rank = least_squares(A, Y)
            self.coefficients = solution.T
            deficient = list(range(n_times)) if rank < A.shape[1] else []
        else:
            coefficients = []
            deficient = []
            for t in range(n_times):
                A = design_matrix(X, t)
                solution, rank = least_squares(A, Y[:, t])
                coefficients.append(solution)
                if rank < A.shape[1]:
                    deficient.append(t)
            self.coefficients = np.array(coefficients)
        self.rank_deficient = tuple(deficient)
        if deficient:
            logger.warning(
                f"lr: rank-deficient design at {len(deficient)} of {n_times} times "
                f"(first t={deficient[0]}), using minimum-norm coefficients"
            )

    def _predict(self, X: FloatArray, db: FlightDatabase) -> FloatArray:
        if self.coefficients is None:
            raise NotFittedError("lr has not been fitted")
        if self.features == FeatureMode.FULL:
            return design_matrix(X, None) @ self.coefficients.T
        return np.column_stack([design_matrix(X, t) @ coef for t, coef in enumerate(self.coefficients)])

    def describe(self) -> dict:
        return {"model": self.label, "features": str(self.features)}
