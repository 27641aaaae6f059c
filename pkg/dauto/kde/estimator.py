"""Kernel density estimation through an encoder/decoder transformation.

The estimator places one kernel on ``g(f(x_i))`` for every reference ``x_i``:

    p(x) ∝ 1/(n w) Σ_i K((x - g(f(x_i))) / w)

with K(u) = exp(-‖u‖²/2) (gaussian) or exp(-‖u‖₁) (laplacian). Densities are
unnormalized: the (2π)^{d/2} factor and the overall proportionality constant are
dropped everywhere, so values are comparable to each other and to the bound,
never to calibrated log-probabilities.

Keeping only the j-th term of the sum for the query ``x_j`` gives

    -log p(x_j) <= ‖x_j - g(f(x_j))‖² / (2w²) + log(n w)

i.e. a scaled reconstruction loss plus a constant.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.special import logsumexp

from dauto.tensor import Matrix, ShapeError

Kernel = Literal["gaussian", "laplacian"]
Transform = Callable[[Matrix], Matrix]

BOUND_TOLERANCE = 1e-12
# caps the (queries, references, dim) difference tensor built per block
QUERY_CHUNK_ELEMENTS = 1 << 22


class KdeError(ValueError):
    """Raised for invalid estimator configuration or misuse."""
    pass


class BoundViolationError(RuntimeError):
    """Raised when the reconstruction bound fails beyond machine tolerance."""
    pass


def identity_transform(x: Matrix) -> Matrix:
    return x


@dataclass(frozen=True)
class BoundReport:
    """Both sides of the reconstruction bound for one reference instance."""

    query_index: int
    nll_unnormalized: float
    bound_value: float
    gap: float
    lambda_: float  # 1/(2w²) for gaussian, 1/w for laplacian
    c: float  # log(n w)


@dataclass(frozen=True)
class TransformedKde:
    """
    Immutable estimator over a reference set.

    Attributes:
        kernel: "gaussian" or "laplacian".
        bandwidth: w > 0.
        references: (n, d) unlabeled instances.
        transform: g∘f applied to references; identity by default.
    """

    kernel: Kernel
    bandwidth: float
    references: Matrix
    transform: Transform = field(default=identity_transform, compare=False)

    def __post_init__(self) -> None:
        if self.kernel not in ("gaussian", "laplacian"):
            raise KdeError(f"unknown kernel: {self.kernel!r}")
        if not self.bandwidth > 0:
            raise KdeError(f"bandwidth must be > 0, got {self.bandwidth}")
        refs = np.asarray(self.references, dtype=np.float64)
        if refs.ndim != 2 or refs.shape[0] == 0:
            raise KdeError(f"reference set must be a non-empty (n, d) matrix, got {refs.shape}")
        object.__setattr__(self, "references", refs)

    @property
    def n(self) -> int:
        return self.references.shape[0]

    @property
    def dim(self) -> int:
        return self.references.shape[1]

    @property
    def log_norm(self) -> float:
        """The constant c = log(n w)."""
        return math.log(self.n * self.bandwidth)

    @cached_property
    def centers(self) -> Matrix:
        """Kernel centers g(f(x_i))."""
        out = np.asarray(self.transform(self.references), dtype=np.float64)
        if out.shape != self.references.shape:
            raise ShapeError(
                f"transform maps {self.references.shape} to {out.shape}; shapes must agree"
            )
        return out

    def log_kernels(self, x: Matrix) -> Matrix:
        """(q, n) matrix of log K((x_q - center_i)/w)."""
        diff = x[:, None, :] - self.centers[None, :, :]
        w = self.bandwidth
        if self.kernel == "gaussian":
            return -np.sum(diff * diff, axis=2) / (2.0 * w * w)
        return -np.sum(np.abs(diff), axis=2) / w

    def log_density(self, x: Matrix) -> np.ndarray:
        """Unnormalized log density for every row of `x`."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.dim:
            raise ShapeError(f"query dimension {x.shape[1]} does not match references {self.dim}")
        rows = max(1, QUERY_CHUNK_ELEMENTS // (self.n * self.dim))
        out = np.empty(x.shape[0])
        for start in range(0, x.shape[0], rows):
            block = x[start:start + rows]
            out[start:start + rows] = logsumexp(self.log_kernels(block), axis=1)
        return out - self.log_norm


def kde_log_density(est: TransformedKde, x: np.ndarray) -> float:
    """log[(1/(n w)) Σ_i K((x - g(f(x_i)))/w)] for a single query vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return float(est.log_density(x.reshape(1, -1))[0])


def _check_index(est: TransformedKde, j: int) -> None:
    if not 0 <= j < est.n:
        raise KdeError(f"reference index {j} out of range for n={est.n}")


def _bound_report(est: TransformedKde, j: int, recon_distance: float, lam: float) -> BoundReport:
    nll = -kde_log_density(est, est.references[j])
    bound = lam * recon_distance + est.log_norm
    gap = bound - nll
    if gap < -BOUND_TOLERANCE * max(1.0, abs(bound)):
        raise BoundViolationError(
            f"bound violated at j={j}: nll={nll!r} > bound={bound!r} (gap {gap!r})"
        )
    return BoundReport(
        query_index=j,
        nll_unnormalized=nll,
        bound_value=bound,
        gap=gap,
        lambda_=lam,
        c=est.log_norm,
    )


def kde_bound_check(est: TransformedKde, j: int) -> BoundReport:
    """Gaussian-kernel bound: λ‖x_j - g(f(x_j))‖² + c with λ = 1/(2w²), c = log(n w)."""
    if est.kernel != "gaussian":
        raise KdeError("squared-l2 bound requires the gaussian kernel; use kde_bound_check_l1")
    _check_index(est, j)
    diff = est.references[j] - est.centers[j]
    w = est.bandwidth
    return _bound_report(est, j, float(np.sum(diff * diff)), 1.0 / (2.0 * w * w))


def kde_bound_check_l1(est: TransformedKde, j: int) -> BoundReport:
    """Laplacian-kernel bound: ‖x_j - g(f(x_j))‖₁ / w + log(n w)."""
    if est.kernel != "laplacian":
        raise KdeError("l1 bound requires the laplacian kernel; use kde_bound_check")
    _check_index(est, j)
    diff = est.references[j] - est.centers[j]
    return _bound_report(est, j, float(np.sum(np.abs(diff))), 1.0 / est.bandwidth)


def bound_reports(est: TransformedKde, indices: Iterable[int] | None = None) -> list[BoundReport]:
    """Bound check for the given references (all by default) under the estimator's own kernel."""
    check = kde_bound_check if est.kernel == "gaussian" else kde_bound_check_l1
    return [check(est, j) for j in (range(est.n) if indices is None else indices)]
