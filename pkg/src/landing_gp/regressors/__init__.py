from .base import FeatureMode, NotFittedError, Regressor, design_matrix
from .cart import CartNode, CartTree, best_split, cart_fit, cart_predict
from .forest import ForestConfig, RandomForestRegressor
from .gaussian import GaussianProcessRegressor
from .linear import LinearRegressor

__all__ = [
    "CartNode",
    "CartTree",
    "FeatureMode",
    "ForestConfig",
    "GaussianProcessRegressor",
    "LinearRegressor",
    "NotFittedError",
    "RandomForestRegressor",
    "Regressor",
    "best_split",
    "cart_fit",
    "cart_predict",
    "design_matrix",
]
