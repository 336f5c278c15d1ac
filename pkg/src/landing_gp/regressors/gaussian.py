from ..constants import DEFAULT_BLOCKS
from ..dataset import FlightDatabase
from ..gp import GpModel, OptimizerConfig, TimeWeight, block_scheme, fit_model, predict_profile
from ..gp.kernel import FloatArray
from .base import NotFittedError, Regressor


class GaussianProcessRegressor(Regressor):
    """Blockwise GP reconstruction behind the common regressor interface."""

    label = "gp"

    def __init__(
        self,
        n_blocks: int = DEFAULT_BLOCKS,
        optimizer: OptimizerConfig | None = None,
        weight: TimeWeight | None = None,
        standardize: bool = False,
        threads: int = 1,
    ):
        super().__init__()
        self.n_blocks = n_blocks
        self.optimizer = optimizer or OptimizerConfig()
        self.weight = weight or TimeWeight.uniform()
        self.standardize = standardize
        self.threads = threads
        self.model: GpModel | None = None

    @classmethod
    def from_model(cls, model: GpModel) -> "GaussianProcessRegressor":
        regressor = cls(n_blocks=len(model.blocks), weight=model.weight, standardize=model.scaler is not None)
        regressor.model = model
        regressor._horizon = model.horizon
        return regressor

    def _fit(self, X: FloatArray, Y: FloatArray, db: FlightDatabase) -> None:
        scheme = block_scheme(db.horizon, self.n_blocks)
        self.model = fit_model(
            db, scheme, self.optimizer, self.weight, standardize=self.standardize, threads=self.threads
        )

    def _predict(self, X: FloatArray, db: FlightDatabase) -> FloatArray:
        if self.model is None:
            raise NotFittedError("gp has not been fitted")
        return predict_profile(self.model, X)

    def describe(self) -> dict:
        return {
            "model": self.label,
            "blocks": self.n_blocks,
            "weight": str(self.weight.mode),
            "standardize": self.standardize,
            "optimizer_seed": self.optimizer.seed,
        }
