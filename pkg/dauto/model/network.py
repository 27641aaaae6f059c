"""The DAuto architecture: encoder, mirrored decoder, label predictor, domain head.

    x ──f──> z ──h──> class probabilities
             z ──g──> reconstruction of x
             z ──GRL──h̃──> domain probabilities

Only f and h are needed at inference time.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from dauto.config.schema import ArchitectureConfig
from dauto.nn import (
    AffineLayer,
    Dropout,
    relu_backward,
    relu_forward,
    softmax_forward,
)
from dauto.tensor import Matrix, Rng, ShapeError

Want = Literal["predict", "reconstruct", "domain"]

NUM_DOMAINS = 2


class ForwardOutputs(NamedTuple):
    """Requested outputs of a forward pass; unrequested entries are None."""
    predict: Matrix | None = None
    reconstruct: Matrix | None = None
    domain: Matrix | None = None


@dataclass
class Stack:
    """Affine layers with ReLU between them; optionally linear on the last layer."""

    layers: list[AffineLayer]
    linear_output: bool = False
    dropout: Dropout = field(default_factory=Dropout)
    _pre: list[Matrix] = field(default_factory=list, repr=False)
    _masks: list[Dropout] = field(default_factory=list, repr=False)

    def forward(self, x: Matrix, rng: Rng | None = None, training: bool = False) -> Matrix:
        self._pre = []
        self._masks = []
        h = x
        last = len(self.layers) - 1
        for i, layer in enumerate(self.layers):
            a = layer.forward(h)
            self._pre.append(a)
            if self.linear_output and i == last:
                h = a
                break
            h = relu_forward(a)
            drop = Dropout(self.dropout.rate)
            h = drop.forward(h, rng, training)
            self._masks.append(drop)
        return h

    def backward(self, d_out: Matrix) -> tuple[dict[str, Matrix], Matrix]:
        """Returns per-layer gradients keyed "<index>.weight"/"<index>.bias" and d_input."""
        grads: dict[str, Matrix] = {}
        d = d_out
        for i in reversed(range(len(self.layers))):
            if not (self.linear_output and i == len(self.layers) - 1):
                d = self._masks[i].backward(d)
                d = relu_backward(self._pre[i], d)
            g = self.layers[i].backward(d)
            grads[f"{i}.weight"] = g.d_weight
            grads[f"{i}.bias"] = g.d_bias
            d = g.d_input
        return grads, d

    def parameters(self) -> dict[str, Matrix]:
        params: dict[str, Matrix] = {}
        for i, layer in enumerate(self.layers):
            params[f"{i}.weight"] = layer.weight
            params[f"{i}.bias"] = layer.bias
        return params


@dataclass
class DautoModel:
    """
    Parameter bundle and topology of the joint model.

    The encoder's final output z is the shared representation feeding both the
    label predictor and (through gradient reversal) the domain classifier.
    """

    encoder: Stack
    decoder: Stack
    predictor: AffineLayer
    domain_head: AffineLayer
    init_scheme: str = "gaussian(std=1/sqrt(fan_in))"

    @classmethod
    def build(
        cls,
        input_dim: int,
        num_classes: int,
        arch: ArchitectureConfig,
        rng: Rng,
    ) -> DautoModel:
        """Initialize a model whose decoder mirrors the encoder layer by layer."""
        if input_dim <= 0 or num_classes < 2:
            raise ValueError(f"need input_dim > 0 and num_classes >= 2, got {input_dim}, "
                             f"{num_classes}")
        dims = [input_dim, *arch.hidden_dims]
        std = arch.init_std
        enc = [AffineLayer.create(a, b, rng, std) for a, b in zip(dims[:-1], dims[1:])]
        rev = dims[::-1]
        dec = [AffineLayer.create(a, b, rng, std) for a, b in zip(rev[:-1], rev[1:])]
        scheme = f"gaussian(std={std})" if std is not None else "gaussian(std=1/sqrt(fan_in))"
        return cls(
            encoder=Stack(enc, dropout=Dropout(arch.dropout)),
            decoder=Stack(dec, linear_output=True),
            predictor=AffineLayer.create(dims[-1], num_classes, rng, std),
            domain_head=AffineLayer.create(dims[-1], NUM_DOMAINS, rng, std),
            init_scheme=scheme,
        )

    @property
    def input_dim(self) -> int:
        return self.encoder.layers[0].in_dim

    @property
    def hidden_dims(self) -> list[int]:
        return [layer.out_dim for layer in self.encoder.layers]

    @property
    def num_classes(self) -> int:
        return self.predictor.out_dim

    @property
    def dropout_rate(self) -> float:
        return self.encoder.dropout.rate

    def parameters(self) -> dict[str, Matrix]:
        """Every trainable array, keyed by component-qualified name, in layer order."""
        params: dict[str, Matrix] = {}
        for name, value in self.encoder.parameters().items():
            params[f"encoder.{name}"] = value
        for name, value in self.decoder.parameters().items():
            params[f"decoder.{name}"] = value
        params["predictor.weight"] = self.predictor.weight
        params["predictor.bias"] = self.predictor.bias
        params["domain_head.weight"] = self.domain_head.weight
        params["domain_head.bias"] = self.domain_head.bias
        return params

    def snapshot(self) -> dict[str, Matrix]:
        return {k: v.copy() for k, v in self.parameters().items()}

    def restore(self, snapshot: dict[str, Matrix]) -> None:
        """Copy values back in place so optimizer state keyed on the arrays stays valid."""
        for name, value in self.parameters().items():
            value[...] = snapshot[name]

    def clone(self) -> DautoModel:
        return copy.deepcopy(self)

    def _check_input(self, x: Matrix) -> None:
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ShapeError(f"input {x.shape} does not match model input dim {self.input_dim}")

    def represent(self, x: Matrix) -> Matrix:
        """Shared representation z = f(x), inference mode."""
        self._check_input(x)
        return self.encoder.forward(x)

    def forward(
        self,
        x: Matrix,
        want: Want | tuple[Want, ...] = "predict",
        training: bool = False,
        rng: Rng | None = None,
    ) -> ForwardOutputs:
        """
        Compute the requested heads on a shared encoder pass.

        predict = h(f(x)), reconstruct = g(f(x)), domain = h̃(f(x)). Gradient reversal is
        the identity going forward, so it only exists inside `joint_loss`, built with
        the step's μ. Dropout is only active when `training` is set.
        """
        self._check_input(x)
        wants = (want,) if isinstance(want, str) else tuple(want)
        z = self.encoder.forward(x, rng, training)
        out: dict[str, Matrix] = {}
        if "predict" in wants:
            out["predict"] = softmax_forward(self.predictor.forward(z))
        if "reconstruct" in wants:
            out["reconstruct"] = self.decoder.forward(z)
        if "domain" in wants:
            out["domain"] = softmax_forward(self.domain_head.forward(z))
        return ForwardOutputs(**out)

    def predict_proba(self, x: Matrix) -> Matrix:
        return self.forward(x, "predict").predict

    def predict(self, x: Matrix) -> np.ndarray:
        return np.argmax(self.predict_proba(x), axis=1)

    def reconstruct(self, x: Matrix) -> Matrix:
        """g(f(x)); usable directly as the transform of a TransformedKde."""
        return self.forward(x, "reconstruct").reconstruct
