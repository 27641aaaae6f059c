"""Layers with hand-written forward and backward passes.

Convention: batches are rows, an affine layer computes ``x @ W.T + b`` with
``W`` of shape (out, in). Every backward returns exact analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from dauto.tensor import Matrix, Rng, ShapeError, check_same_shape, gaussian_init


class BackwardBeforeForwardError(RuntimeError):
    """Raised when backward is called without a cached forward input."""
    pass


class LayerGrads(NamedTuple):
    """Gradients produced by one affine backward pass."""
    d_weight: Matrix
    d_bias: Matrix  # shape (out,)
    d_input: Matrix


@dataclass
class AffineLayer:
    """
    Fully connected layer ``y = x @ W.T + b``.

    The forward input is cached so the matching backward can form the weight
    gradient; one forward/backward pair at a time per instance.
    """

    weight: Matrix
    bias: Matrix
    _input: Matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        if self.weight.ndim != 2 or self.bias.shape[0] != self.weight.shape[0]:
            raise ShapeError(
                f"bias shape {self.bias.shape} does not match weight shape {self.weight.shape}"
            )

    @classmethod
    def create(
        cls, in_dim: int, out_dim: int, rng: Rng, std: float | None = None
    ) -> AffineLayer:
        """Gaussian weights with std 1/sqrt(fan_in) unless given, zero bias."""
        std = std if std is not None else 1.0 / np.sqrt(in_dim)
        return cls(weight=gaussian_init(rng, out_dim, in_dim, std), bias=np.zeros(out_dim))

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    def forward(self, x: Matrix) -> Matrix:
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeError(f"affine input {x.shape} does not match weight {self.weight.shape}")
        self._input = x
        return x @ self.weight.T + self.bias

    def backward(self, d_out: Matrix) -> LayerGrads:
        if self._input is None:
            raise BackwardBeforeForwardError("affine backward called before forward")
        if d_out.shape != (self._input.shape[0], self.out_dim):
            raise ShapeError(
                f"upstream gradient {d_out.shape} does not match output "
                f"{(self._input.shape[0], self.out_dim)}"
            )
        return LayerGrads(
            d_weight=d_out.T @ self._input,
            d_bias=d_out.sum(axis=0),
            d_input=d_out @ self.weight,
        )


def affine_forward(layer: AffineLayer, x: Matrix) -> Matrix:
    return layer.forward(x)


def affine_backward(layer: AffineLayer, d_out: Matrix) -> LayerGrads:
    return layer.backward(d_out)


def relu_forward(x: Matrix) -> Matrix:
    return np.maximum(x, 0.0)


def relu_backward(x: Matrix, d_out: Matrix) -> Matrix:
    """Pass d_out where x > 0, zero elsewhere (subgradient 0 at the kink)."""
    check_same_shape(x, d_out, "relu backward")
    return np.where(x > 0.0, d_out, 0.0)


def sigmoid_forward(x: Matrix) -> Matrix:
    # Split by sign so exp never overflows.
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid_backward(y: Matrix, d_out: Matrix) -> Matrix:
    """Backward given the sigmoid *output* y."""
    check_same_shape(y, d_out, "sigmoid backward")
    return d_out * y * (1.0 - y)


def softmax_forward(logits: Matrix) -> Matrix:
    """Row-wise softmax with max subtraction."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)


@dataclass
class GradReversal:
    """
    Identity on the way forward, ``-mu`` times the upstream gradient on the way back.

    Placed between the shared representation and the domain classifier, it lets a
    single descent step minimize the domain loss for the classifier while pushing
    the encoder to maximize it.
    """

    mu: float = 1.0

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"gradient reversal weight must be >= 0, got {self.mu}")

    def forward(self, z: Matrix) -> Matrix:
        return z

    def backward(self, d_out: Matrix) -> Matrix:
        return -self.mu * d_out


def grl_forward(g: GradReversal, z: Matrix) -> Matrix:
    return g.forward(z)


def grl_backward(g: GradReversal, d_out: Matrix) -> Matrix:
    return g.backward(d_out)


@dataclass
class Dropout:
    """Inverted Bernoulli dropout; identity outside training."""

    rate: float = 0.0
    _mask: Matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {self.rate}")

    def forward(self, x: Matrix, rng: Rng | None = None, training: bool = False) -> Matrix:
        if not training or self.rate == 0.0:
            self._mask = None
            return x
        if rng is None:
            raise ValueError("dropout in training mode needs an Rng")
        keep = 1.0 - self.rate
        self._mask = rng.bernoulli(x.shape, keep) / keep
        return x * self._mask

    def backward(self, d_out: Matrix) -> Matrix:
        if self._mask is None:
            return d_out
        return d_out * self._mask
