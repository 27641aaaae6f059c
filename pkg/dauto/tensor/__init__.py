"""Dense matrix arithmetic and seeded randomness."""

from dauto.tensor.ops import (
    Matrix,
    ShapeError,
    as_matrix,
    check_same_shape,
    col_sum,
    elementwise,
    frobenius_sq,
    gaussian_init,
    matmul,
    row_sum,
    scale,
    transpose,
)
from dauto.tensor.rng import Rng

__all__ = [
    "Matrix",
    "Rng",
    "ShapeError",
    "as_matrix",
    "check_same_shape",
    "col_sum",
    "elementwise",
    "frobenius_sq",
    "gaussian_init",
    "matmul",
    "row_sum",
    "scale",
    "transpose",
]
