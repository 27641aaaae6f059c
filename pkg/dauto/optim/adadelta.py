"""AdaDelta and plain SGD over named parameter sets.

Parameters and gradients are ``dict[str, ndarray]`` with matching keys and
shapes. Updates are applied in place; the parameter dict is also returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from dauto.tensor import Matrix, ShapeError

Params = dict[str, Matrix]


class NonFiniteGradientError(ValueError):
    """Raised when a gradient holds NaN or Inf; the step is not applied."""

    def __init__(self, name: str) -> None:
        super().__init__(f"non-finite gradient for parameter '{name}'")
        self.name = name


def _check_grads(params: Params, grads: Params) -> None:
    if params.keys() != grads.keys():
        missing = sorted(set(params) ^ set(grads))
        raise ShapeError(f"parameter/gradient key mismatch: {missing}")
    for name, value in params.items():
        g = grads[name]
        if g.shape != value.shape:
            raise ShapeError(f"gradient for '{name}' has shape {g.shape}, parameter {value.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(name)


@dataclass
class AdaDeltaState:
    """
    Running averages E[g²] and E[Δx²] per parameter, zero-initialized.

    Defaults rho=0.95 and epsilon=1e-6; lr stays at 1.0 for every experiment.
    """

    rho: float = 0.95
    epsilon: float = 1e-6
    lr: float = 1.0
    square_avg: Params = field(default_factory=dict)  # E[g²]
    delta_avg: Params = field(default_factory=dict)  # E[Δx²]

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    @classmethod
    def for_params(
        cls, params: Params, rho: float = 0.95, epsilon: float = 1e-6, lr: float = 1.0
    ) -> AdaDeltaState:
        return cls(
            rho=rho,
            epsilon=epsilon,
            lr=lr,
            square_avg={k: np.zeros_like(v) for k, v in params.items()},
            delta_avg={k: np.zeros_like(v) for k, v in params.items()},
        )


def _check_state(state: AdaDeltaState, params: Params) -> None:
    for avg in (state.square_avg, state.delta_avg):
        if avg.keys() != params.keys():
            raise ShapeError(f"optimizer state tracks {sorted(avg)} but got {sorted(params)}")
        for name, value in params.items():
            if avg[name].shape != value.shape:
                logger.error(f"AdaDelta state for '{name}' no longer matches its parameter")
                raise ShapeError(
                    f"optimizer state for '{name}' has shape {avg[name].shape}, "
                    f"parameter {value.shape}"
                )


def adadelta_step(state: AdaDeltaState, params: Params, grads: Params) -> Params:
    """
    One AdaDelta update:

        E[g²]  <- rho E[g²] + (1 - rho) g²
        Δx     = -sqrt(E[Δx²] + eps) / sqrt(E[g²] + eps) * g
        E[Δx²] <- rho E[Δx²] + (1 - rho) Δx²
        x      <- x + lr Δx

    All gradients are validated before any parameter moves.
    """
    _check_grads(params, grads)
    _check_state(state, params)
    rho, eps = state.rho, state.epsilon
    for name, value in params.items():
        g = grads[name]
        sq = state.square_avg[name]
        acc = state.delta_avg[name]
        sq *= rho
        sq += (1.0 - rho) * g * g
        delta = -(np.sqrt(acc + eps) / np.sqrt(sq + eps)) * g
        acc *= rho
        acc += (1.0 - rho) * delta * delta
        value += state.lr * delta
    return params


def sgd_step(params: Params, grads: Params, lr: float) -> Params:
    """x <- x - lr * g for every parameter."""
    _check_grads(params, grads)
    for name, value in params.items():
        value -= lr * grads[name]
    return params
