"""Classification accuracy and the classifier-error proxy of the 𝒜-distance."""

from __future__ import annotations

import numpy as np
from loguru import logger

from dauto.nn import AffineLayer, cross_entropy, one_hot, softmax_forward
from dauto.optim import AdaDeltaState, adadelta_step
from dauto.tensor import Matrix, Rng, ShapeError


def accuracy(preds: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of exact label matches."""
    preds, truth = np.asarray(preds).reshape(-1), np.asarray(truth).reshape(-1)
    if preds.shape != truth.shape:
        raise ShapeError(f"{preds.size} predictions for {truth.size} labels")
    if preds.size == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    return float(np.mean(preds == truth))


def balanced_error(domain_probs: Matrix, domain_tags: np.ndarray) -> float:
    """Mean of the two per-domain error rates of argmax domain predictions."""
    probs = np.asarray(domain_probs, dtype=np.float64)
    if probs.ndim == 1:
        probs = np.column_stack([1.0 - probs, probs])
    tags = np.asarray(domain_tags).reshape(-1)
    if probs.shape[0] != tags.shape[0]:
        raise ShapeError(f"{probs.shape[0]} domain predictions for {tags.shape[0]} tags")
    if not (np.any(tags == 0) and np.any(tags == 1)):
        raise ValueError("proxy 𝒜-distance needs instances from both domains")
    pred = np.argmax(probs, axis=1)
    errors = [float(np.mean(pred[tags == d] != d)) for d in (0, 1)]
    return 0.5 * (errors[0] + errors[1])


def proxy_a_distance(domain_probs: Matrix, domain_tags: np.ndarray) -> float:
    """
    2(1 - 2ε) clipped to [0, 2], with ε the balanced domain-classification error.

    ε is folded to min(ε, 1 - ε): a classifier that is always wrong separates the
    domains as well as one that is always right, and swapping the domain tags
    leaves the value unchanged.

    Args:
        domain_probs: (n, 2) domain probabilities, or (n,) probabilities of domain 1.
        domain_tags: 0 for source, 1 for target.
    """
    eps = balanced_error(domain_probs, domain_tags)
    eps = min(eps, 1.0 - eps)
    return float(np.clip(2.0 * (1.0 - 2.0 * eps), 0.0, 2.0))


def _domain_tags(n_source: int, n_target: int) -> np.ndarray:
    return np.repeat(np.array([0, 1], dtype=np.int64), [n_source, n_target])


def _halves(n: int, rng: Rng) -> tuple[np.ndarray, np.ndarray]:
    order = rng.permutation(n)
    half = n // 2
    return order[:half], order[half:]


def representation_a_distance(
    z_source: Matrix,
    z_target: Matrix,
    seed: int,
    epochs: int = 50,
    batch_size: int = 64,
) -> float:
    """
    Proxy 𝒜-distance between two sets of representations.

    A zero-initialized linear domain classifier (affine + softmax) is fitted with
    AdaDelta on standardized features of a seeded half of each domain and scored on
    the remaining halves.

    Raises:
        ValueError: Either domain has fewer than 2 rows.
    """
    z_source = np.asarray(z_source, dtype=np.float64)
    z_target = np.asarray(z_target, dtype=np.float64)
    if z_source.shape[0] < 2 or z_target.shape[0] < 2:
        raise ValueError("each domain needs at least 2 representations")
    if z_source.shape[1] != z_target.shape[1]:
        raise ShapeError(f"representation dims differ: {z_source.shape} vs {z_target.shape}")

    rng = Rng(seed).child("a_distance")
    s_fit, s_eval = _halves(z_source.shape[0], rng.child("source"))
    t_fit, t_eval = _halves(z_target.shape[0], rng.child("target"))
    x_fit = np.vstack([z_source[s_fit], z_target[t_fit]])
    d_fit = _domain_tags(s_fit.size, t_fit.size)
    x_eval = np.vstack([z_source[s_eval], z_target[t_eval]])
    d_eval = _domain_tags(s_eval.size, t_eval.size)

    # standardize with fit-split statistics; constant features stay at zero
    mean = x_fit.mean(axis=0)
    std = x_fit.std(axis=0)
    std[std == 0.0] = 1.0
    x_fit = (x_fit - mean) / std
    x_eval = (x_eval - mean) / std

    clf = AffineLayer(weight=np.zeros((2, x_fit.shape[1])), bias=np.zeros(2))
    params = {"weight": clf.weight, "bias": clf.bias}
    state = AdaDeltaState.for_params(params)
    order_rng = rng.child("order")
    targets = one_hot(d_fit, 2)
    for _ in range(epochs):
        perm = order_rng.permutation(x_fit.shape[0])
        for start in range(0, perm.size, batch_size):
            idx = perm[start:start + batch_size]
            ce = cross_entropy(softmax_forward(clf.forward(x_fit[idx])), targets[idx])
            g = clf.backward(ce.grad)
            adadelta_step(state, params, {"weight": g.d_weight, "bias": g.d_bias})

    value = proxy_a_distance(softmax_forward(clf.forward(x_eval)), d_eval)
    logger.debug(f"representation proxy A-distance: {value:.4f}")
    return value
