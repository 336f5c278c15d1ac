import logging
import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..config import ConfigError, derive_seed, parse_bool, parse_int
from ..constants import CART_LEAF_MIN, DEFAULT_N_TREES
from ..dataset import FlightDatabase
from ..gp.kernel import FloatArray
from .base import FeatureMode, NotFittedError, Regressor, design_matrix
from .cart import CartTree, cart_fit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForestConfig:
    """Bagged CART settings. `bootstrap=False` fits every tree on the full sample (testing aid)."""

    n_trees: int = DEFAULT_N_TREES
    seed: int = 0
    features: FeatureMode = FeatureMode.PER_T
    leaf_min: int = CART_LEAF_MIN
    bootstrap: bool = True

    def __post_init__(self):
        object.__setattr__(self, "features", FeatureMode(self.features))
        if self.n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.leaf_min < 1:
            raise ConfigError(f"leaf_min must be >= 1, got {self.leaf_min}")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], **overrides) -> "ForestConfig":
        values: dict = {
            "n_trees": parse_int(mapping, "n_trees", DEFAULT_N_TREES),
            "seed": parse_int(mapping, "seed", 0),
            "features": mapping.get("features") or FeatureMode.PER_T,
            "leaf_min": parse_int(mapping, "leaf_min", CART_LEAF_MIN),
            "bootstrap": parse_bool(mapping, "bootstrap", True),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


class RandomForestRegressor(Regressor):
    """
    Per-time random forest: for each t, `n_trees` CART trees on bootstrap resamples of the
    time-t design rows, averaged. Tree (t, i) draws its resample from a stream seeded by
    (seed, t, i), so fits do not depend on thread scheduling.
    """

    label = "rf"

    def __init__(self, config: ForestConfig | None = None, threads: int = 1):
        super().__init__()
        self.config = config or ForestConfig()
        self.threads = max(1, threads)
        self.trees: list[list[CartTree]] | None = None

    def _rows(self, X: FloatArray, t: int) -> FloatArray:
        # CART needs no intercept column
        if self.config.features == FeatureMode.FULL:
            return design_matrix(X, None)[:, 1:]
        return design_matrix(X, t)[:, 1:]

    def _fit_time(self, X: FloatArray, y: FloatArray, t: int) -> list[CartTree]:
        rows = self._rows(X, t)
        n = rows.shape[0]
        trees = []
        for i in range(self.config.n_trees):
            if self.config.bootstrap:
                rng = np.random.default_rng(derive_seed(self.config.seed, "forest", t, i))
                sample = rng.integers(0, n, size=n)
                trees.append(cart_fit(rows[sample], y[sample], self.config.leaf_min))
            else:
                trees.append(cart_fit(rows, y, self.config.leaf_min))
        return trees

    def _fit(self, X: FloatArray, Y: FloatArray, db: FlightDatabase) -> None:
        start_time = time.perf_counter()
        n_times = Y.shape[1]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            self.trees = list(pool.map(lambda t: self._fit_time(X, Y[:, t], t), range(n_times)))
        logger.info(
            f"rf: fitted {self.config.n_trees} trees x {n_times} times on {X.shape[0]} landings "
            f"in {time.perf_counter() - start_time:.2f}s"
        )

    def tree_predictions(self, X: FloatArray, t: int) -> FloatArray:
        """Predictions of every member tree at time t, shape (n_trees, n_test)."""
        if self.trees is None:
            raise NotFittedError("rf has not been fitted")
        rows = self._rows(X, t)
        return np.stack([tree.predict(rows) for tree in self.trees[t]])

    def _predict(self, X: FloatArray, db: FlightDatabase) -> FloatArray:
        if self.trees is None:
            raise NotFittedError("rf has not been fitted")
        return np.column_stack([self.tree_predictions(X, t).mean(axis=0) for t in range(len(self.trees))])

    def describe(self) -> dict:
        return {"model": self.label, "features": str(self.config.features), "n_trees": self.config.n_trees}
