"""Desk-scale synthetic domain pairs."""

from __future__ import annotations

import numpy as np
from loguru import logger

from dauto.config.schema import SyntheticSpec
from dauto.data.dataset import DomainPairDataset, labeled, split_target
from dauto.tensor import Matrix, Rng

# two-moons centroid, subtracted so rotations turn about the middle of the data
MOONS_CENTER = np.array([0.5, 0.25])
BLOB_CENTERS = np.array([[-1.0, 0.0], [1.0, 0.0]])


def rotation_matrix(angle_deg: float) -> Matrix:
    theta = np.deg2rad(angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _class_sizes(n: int) -> tuple[int, int]:
    return n // 2, n - n // 2


def two_moons(n: int, noise: float, rng: Rng) -> tuple[Matrix, np.ndarray]:
    """Centered interleaving half circles; class 0 is the upper moon."""
    n0, n1 = _class_sizes(n)
    t0 = rng.uniform(n0, 0.0, np.pi)
    t1 = rng.uniform(n1, 0.0, np.pi)
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    x = np.vstack([upper, lower]) - MOONS_CENTER
    if noise > 0:
        x = x + rng.normal(x.shape, std=noise)
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    order = rng.permutation(n)
    return x[order], y[order]


def gaussian_blobs(n: int, noise: float, rng: Rng) -> tuple[Matrix, np.ndarray]:
    n0, n1 = _class_sizes(n)
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    x = BLOB_CENTERS[y]
    if noise > 0:
        x = x + rng.normal(x.shape, std=noise)
    order = rng.permutation(n)
    return x[order], y[order]


def domain_transform(spec: SyntheticSpec) -> tuple[Matrix, np.ndarray]:
    """(A, b) such that a target point is A @ source_point + b."""
    if spec.generator == "two_moons_rotation":
        return rotation_matrix(spec.angle), np.zeros(2)
    return np.eye(2), np.asarray(spec.shift, dtype=np.float64)


def make_synthetic(spec: SyntheticSpec) -> DomainPairDataset:
    """
    Draw a source sample, a target unlabeled sample, and a labeled target sample for dev/test.

    All three come from the same base distribution; the two target draws are pushed
    through the domain transform. Every draw uses its own child stream of `spec.seed`.
    """
    base = two_moons if spec.generator == "two_moons_rotation" else gaussian_blobs
    rng = Rng(spec.seed)
    a, b = domain_transform(spec)
    n = spec.samples_per_domain

    xs, ys = base(n, spec.noise, rng.child("source"))
    xu, _ = base(n, spec.noise, rng.child("target_unlabeled"))
    xe, ye = base(n, spec.noise, rng.child("target_eval"))
    xu = xu @ a.T + b
    xe = xe @ a.T + b

    dev, test = split_target(xe, ye, spec.seed)
    logger.debug(f"Synthetic {spec.generator}: n={n} noise={spec.noise} angle={spec.angle} "
                 f"shift={spec.shift}")
    return DomainPairDataset(
        source_labeled=labeled(xs, ys),
        source_unlabeled=xs.copy(),
        target_unlabeled=xu,
        target_dev=dev,
        target_test=test,
        num_classes=2,
    )
