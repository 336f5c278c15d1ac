from .core import (
    Factorization,
    FactorizationError,
    GpModel,
    HorizonMismatchError,
    LmlValue,
    ModelFormatError,
    NegativeVarianceError,
    PosteriorResult,
    factorize,
    log_marginal_likelihood,
    posterior,
    predict_profile,
    predictive_variance,
)
from .hyperfit import (
    BlockFit,
    BlockScheme,
    OptimizerConfig,
    block_lml,
    block_scheme,
    fit_block,
    fit_model,
    init_hyperparameters,
)
from .kernel import (
    ChannelScaler,
    Hyperparameters,
    TimeWeight,
    WeightMode,
    channel_sq_dist,
    cross_gram,
    gram,
    kernel_eval,
)

__all__ = [
    "BlockFit",
    "BlockScheme",
    "ChannelScaler",
    "Factorization",
    "FactorizationError",
    "GpModel",
    "HorizonMismatchError",
    "Hyperparameters",
    "LmlValue",
    "ModelFormatError",
    "NegativeVarianceError",
    "OptimizerConfig",
    "PosteriorResult",
    "TimeWeight",
    "WeightMode",
    "block_lml",
    "block_scheme",
    "channel_sq_dist",
    "cross_gram",
    "factorize",
    "fit_block",
    "fit_model",
    "gram",
    "init_hyperparameters",
    "kernel_eval",
    "log_marginal_likelihood",
    "posterior",
    "predict_profile",
    "predictive_variance",
]
