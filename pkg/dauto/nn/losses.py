"""Batch-mean losses returning the value and the gradient in one call."""

from __future__ import annotations

from typing import Literal, NamedTuple

import numpy as np
from loguru import logger

from dauto.tensor import Matrix, check_same_shape

ReconNorm = Literal["squared_l2", "l1"]

PROB_CLAMP = 1e-12


class LossResult(NamedTuple):
    """A scalar loss, its gradient, and whether the value was clamped."""
    loss: float
    grad: Matrix
    clamped: bool = False


def one_hot(labels: np.ndarray, num_classes: int) -> Matrix:
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ValueError(f"labels must lie in [0, {num_classes}), got range "
                         f"[{labels.min()}, {labels.max()}]")
    out = np.zeros((labels.shape[0], num_classes), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def cross_entropy(probs: Matrix, labels: Matrix) -> LossResult:
    """
    Mean negative log-likelihood of one-hot `labels` under row-normalized `probs`.

    The gradient is taken with respect to the *logits* that produced `probs`
    through softmax: ``(probs - labels) / batch``. Probabilities at the true class
    are clamped at 1e-12 before the log; the result is flagged when that happens.
    """
    check_same_shape(probs, labels, "cross-entropy")
    batch = probs.shape[0]
    true_prob = np.sum(probs * labels, axis=1)
    clamped = bool(np.any(true_prob < PROB_CLAMP))
    if clamped:
        logger.warning(f"cross-entropy clamped {int(np.sum(true_prob < PROB_CLAMP))} "
                       f"probabilities at {PROB_CLAMP}")
    loss = float(-np.mean(np.log(np.maximum(true_prob, PROB_CLAMP))))
    return LossResult(loss=loss, grad=(probs - labels) / batch, clamped=clamped)


def recon_loss(x: Matrix, x_hat: Matrix, norm: ReconNorm = "squared_l2") -> LossResult:
    """
    Batch-mean reconstruction distance and its gradient with respect to `x_hat`.

    ``squared_l2`` pairs with a Gaussian kernel, ``l1`` with a Laplacian one; the
    l1 subgradient is 0 where ``x_hat == x``.
    """
    check_same_shape(x, x_hat, "reconstruction")
    batch = x.shape[0]
    diff = x_hat - x
    if norm == "squared_l2":
        return LossResult(loss=float(np.sum(diff * diff) / batch), grad=2.0 * diff / batch)
    if norm == "l1":
        return LossResult(loss=float(np.sum(np.abs(diff)) / batch), grad=np.sign(diff) / batch)
    raise ValueError(f"unknown reconstruction norm: {norm!r}")
