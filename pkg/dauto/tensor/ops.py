"""Dense float64 matrix arithmetic with explicit shape checking.

Every batch is a 2-D array with one instance per row. The helpers here are thin
wrappers over numpy that fail loudly with both shapes in the message instead of
silently broadcasting.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
import numpy.typing as npt

from dauto.tensor.rng import Rng

Matrix = npt.NDArray[np.float64]

ElementwiseOp = Literal["add", "sub", "mul"]


class ShapeError(ValueError):
    """Raised when operand shapes are not conformable."""
    pass


def as_matrix(data: npt.ArrayLike) -> Matrix:
    """Coerce array-like input to a 2-D float64 matrix (vectors become one row)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def check_same_shape(a: Matrix, b: Matrix, what: str = "operands") -> None:
    """Raise ShapeError unless both arrays have identical shapes."""
    if a.shape != b.shape:
        raise ShapeError(f"{what} shape mismatch: {a.shape} vs {b.shape}")


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Standard matrix product of (r, k) and (k, c) matrices."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def elementwise(a: Matrix, b: Matrix, op: ElementwiseOp) -> Matrix:
    """Apply add, sub or mul entry by entry on equally shaped matrices."""
    check_same_shape(a, b, f"elementwise {op}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown elementwise op: {op!r}")


def scale(a: Matrix, c: float) -> Matrix:
    return a * float(c)


def transpose(a: Matrix) -> Matrix:
    return np.ascontiguousarray(a.T)


def row_sum(a: Matrix) -> Matrix:
    """Sum over columns; returns a (rows, 1) column."""
    return a.sum(axis=1, keepdims=True)


def col_sum(a: Matrix) -> Matrix:
    """Sum over rows; returns a (1, cols) row."""
    return a.sum(axis=0, keepdims=True)


def frobenius_sq(a: Matrix) -> float:
    """Sum of squared entries."""
    return float(np.sum(a * a))


def gaussian_init(rng: Rng, rows: int, cols: int, std: float) -> Matrix:
    """Draw a (rows, cols) matrix with i.i.d. N(0, std²) entries from the seeded stream."""
    if not std > 0:
        raise ValueError(f"gaussian_init requires std > 0, got {std}")
    return rng.normal((rows, cols), std=std)
