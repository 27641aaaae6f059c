"""Optimizers: AdaDelta for training, SGD for debugging."""

from dauto.optim.adadelta import (
    AdaDeltaState,
    NonFiniteGradientError,
    Params,
    adadelta_step,
    sgd_step,
)

__all__ = ["AdaDeltaState", "NonFiniteGradientError", "Params", "adadelta_step", "sgd_step"]
