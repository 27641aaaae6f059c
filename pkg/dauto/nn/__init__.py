"""Neural-network building blocks with manual backpropagation."""

from dauto.nn.layers import (
    AffineLayer,
    BackwardBeforeForwardError,
    Dropout,
    GradReversal,
    LayerGrads,
    affine_backward,
    affine_forward,
    grl_backward,
    grl_forward,
    relu_backward,
    relu_forward,
    sigmoid_backward,
    sigmoid_forward,
    softmax_forward,
)
from dauto.nn.losses import LossResult, ReconNorm, cross_entropy, one_hot, recon_loss

__all__ = [
    "AffineLayer",
    "BackwardBeforeForwardError",
    "Dropout",
    "GradReversal",
    "LayerGrads",
    "LossResult",
    "ReconNorm",
    "affine_backward",
    "affine_forward",
    "cross_entropy",
    "grl_backward",
    "grl_forward",
    "one_hot",
    "recon_loss",
    "relu_backward",
    "relu_forward",
    "sigmoid_backward",
    "sigmoid_forward",
    "softmax_forward",
]
