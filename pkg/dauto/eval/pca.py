"""Two-dimensional PCA embeddings by power iteration with deflation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from dauto.tensor import Matrix

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
# eigenvalues below this fraction of the total variance count as zero
RANK_TOL = 1e-12


@dataclass(frozen=True)
class PcaProjection:
    """
    Attributes:
        mean: (d,) column means removed before projecting.
        directions: (2, d) orthonormal principal directions, largest variance first.
        coords: (n, 2) projections of the centered input.
        variances: Eigenvalues of the sample covariance along each direction.
        domain_tags: Optional per-row domain tags carried through for export.
        rank_deficient: Fewer than two directions carry variance; the missing
            coordinates are zeros.
    """

    mean: np.ndarray
    directions: Matrix
    coords: Matrix
    variances: tuple[float, float]
    domain_tags: np.ndarray | None = None
    rank_deficient: bool = False

    def project(self, x: Matrix) -> Matrix:
        return (np.asarray(x, dtype=np.float64) - self.mean) @ self.directions.T


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _orthogonal_to(basis: list[np.ndarray], d: int) -> np.ndarray:
    """Unit vector orthogonal to every vector in `basis`, built from the standard basis."""
    for k in range(d):
        v = np.zeros(d)
        v[k] = 1.0
        for b in basis:
            v -= (v @ b) * b
        if np.linalg.norm(v) > 1e-6:
            return _unit(v)
    raise ValueError("no orthogonal complement")


def power_iteration(
    cov: Matrix,
    basis: list[np.ndarray],
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> tuple[np.ndarray, float]:
    """
    Leading eigenpair of a symmetric PSD matrix restricted to the complement of `basis`.

    The start vector is the covariance column of largest norm after projection, so
    results are deterministic. Returns a zero eigenvalue when the restricted matrix
    vanishes.
    """
    d = cov.shape[0]

    def restrict(v: np.ndarray) -> np.ndarray:
        for b in basis:
            v = v - (v @ b) * b
        return v

    cols = np.array([restrict(cov[:, k]) for k in range(d)])
    norms = np.linalg.norm(cols, axis=1)
    if norms.max() == 0.0:
        return _orthogonal_to(basis, d), 0.0
    v = _unit(cols[np.argmax(norms)])
    for i in range(max_iter):
        w = restrict(cov @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return v, 0.0
        w = w / norm
        if w @ v < 0:
            w = -w
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    else:
        logger.warning(f"power iteration did not converge in {max_iter} iterations")
    return v, float(v @ cov @ v)


def pca2(x: Matrix, domain_tags: np.ndarray | None = None) -> PcaProjection:
    """
    Project rows of `x` onto the top-2 principal directions of their sample covariance.

    Raises:
        ValueError: Fewer than 3 rows or fewer than 2 columns.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3 or x.shape[1] < 2:
        raise ValueError(f"pca2 needs at least 3 rows and 2 columns, got {x.shape}")
    mean = x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / (x.shape[0] - 1)
    total = float(np.trace(cov))
    floor = RANK_TOL * max(total, np.finfo(np.float64).tiny)

    v1, l1 = power_iteration(cov, [])
    v2, l2 = power_iteration(cov, [v1])
    # re-orthogonalize against accumulated rounding
    v2 = _unit(v2 - (v2 @ v1) * v1)
    directions = np.vstack([v1, v2])
    coords = xc @ directions.T

    deficient = l2 <= floor
    if deficient:
        logger.warning(f"pca2: rank-deficient input (variances {l1:.3g}, {l2:.3g}); "
                       "padding missing coordinates with zeros")
        coords[:, 1] = 0.0
        if l1 <= floor:
            coords[:, 0] = 0.0
    tags = None if domain_tags is None else np.asarray(domain_tags).reshape(-1)
    return PcaProjection(
        mean=mean,
        directions=directions,
        coords=coords,
        variances=(max(l1, 0.0), max(l2, 0.0)),
        domain_tags=tags,
        rank_deficient=bool(deficient),
    )
