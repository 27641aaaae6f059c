"""Tests for dense matrix helpers and the seeded RNG."""

import numpy as np
import pytest

from dauto.tensor import (
    Rng,
    ShapeError,
    as_matrix,
    col_sum,
    elementwise,
    frobenius_sq,
    gaussian_init,
    matmul,
    row_sum,
    scale,
    transpose,
)


class TestMatmul:
    """Tests for matmul."""

    def test_identity(self) -> None:
        """Test that multiplying by the identity returns the input."""
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(matmul(a, np.eye(2)), a)

    def test_permutation(self) -> None:
        """Test multiplication by a permutation matrix."""
        p = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), p), p)

    def test_matches_triple_loop(self) -> None:
        """Test that the product matches a naive triple loop."""
        rng = Rng(3)
        a, b = rng.normal((3, 4)), rng.normal((4, 5))
        expected = np.zeros((3, 5))
        for i in range(3):
            for j in range(5):
                for k in range(4):
                    expected[i, j] += a[i, k] * b[k, j]
        np.testing.assert_allclose(matmul(a, b), expected, atol=1e-12, rtol=0)

    def test_shape_mismatch_names_both_shapes(self) -> None:
        """Test that a dimension mismatch reports both shapes."""
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
            matmul(np.zeros((2, 3)), np.zeros((2, 3)))

    def test_associativity_and_transpose_identity(self) -> None:
        """Test (AB)C == A(BC) and (AB)^T == B^T A^T."""
        rng = Rng(11)
        a, b, c = rng.normal((4, 3)), rng.normal((3, 6)), rng.normal((6, 2))
        left = matmul(matmul(a, b), c)
        right = matmul(a, matmul(b, c))
        np.testing.assert_allclose(left, right, rtol=1e-9)
        np.testing.assert_allclose(
            transpose(matmul(a, b)), matmul(transpose(b), transpose(a)), atol=1e-12
        )


class TestElementwise:
    """Tests for elementwise helpers and reductions."""

    def test_frobenius_3_4_5(self) -> None:
        """Test the squared Frobenius norm of [[3, 4]]."""
        assert frobenius_sq(np.array([[3.0, 4.0]])) == 25.0

    def test_transpose_involution(self) -> None:
        """Test that transposing twice returns the original."""
        a = Rng(0).normal((3, 5))
        np.testing.assert_array_equal(transpose(transpose(a)), a)

    def test_additive_inverse(self) -> None:
        """Test that A + (-1)A is the zero matrix."""
        a = Rng(1).normal((2, 3))
        np.testing.assert_array_equal(elementwise(a, scale(a, -1.0), "add"), np.zeros((2, 3)))

    def test_sub_and_mul(self) -> None:
        """Test sub and mul semantics."""
        a = np.array([[1.0, 2.0]])
        b = np.array([[3.0, 5.0]])
        np.testing.assert_array_equal(elementwise(a, b, "sub"), [[-2.0, -3.0]])
        np.testing.assert_array_equal(elementwise(a, b, "mul"), [[3.0, 10.0]])

    def test_shape_mismatch(self) -> None:
        """Test that unequal shapes are rejected instead of broadcast."""
        with pytest.raises(ShapeError, match="mismatch"):
            elementwise(np.zeros((1, 2)), np.zeros((2, 2)), "add")

    def test_row_and_col_sums(self) -> None:
        """Test reduction shapes and values."""
        a = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        np.testing.assert_array_equal(row_sum(a), [[6.0], [15.0]])
        np.testing.assert_array_equal(col_sum(a), [[5.0, 7.0, 9.0]])

    def test_as_matrix_promotes_vectors(self) -> None:
        """Test that a vector becomes a single row."""
        assert as_matrix([1, 2, 3]).shape == (1, 3)
        with pytest.raises(ShapeError):
            as_matrix(np.zeros((2, 2, 2)))


class TestGaussianInit:
    """Tests for gaussian_init."""

    def test_sample_mean_near_zero(self) -> None:
        """Test the law-of-large-numbers bound on 10^6 draws."""
        w = gaussian_init(Rng(5), 1000, 1000, std=1.0)
        assert abs(w.mean()) < 4.0 / 1000

    def test_same_seed_same_matrix(self) -> None:
        """Test determinism under a fixed seed."""
        np.testing.assert_array_equal(
            gaussian_init(Rng(9), 4, 3, 0.5), gaussian_init(Rng(9), 4, 3, 0.5)
        )

    def test_small_std_bounded(self) -> None:
        """Test that std=0.01 entries stay far inside 10 standard deviations."""
        assert np.all(np.abs(gaussian_init(Rng(2), 2, 2, 0.01)) < 0.1)

    def test_non_positive_std(self) -> None:
        """Test that std <= 0 is rejected."""
        with pytest.raises(ValueError, match="std > 0"):
            gaussian_init(Rng(0), 2, 2, 0.0)


class TestRng:
    """Tests for the Philox-backed Rng."""

    def test_reproducible_stream(self) -> None:
        """Test that equal seeds give equal first 10^4 draws."""
        np.testing.assert_array_equal(Rng(42).normal(10_000), Rng(42).normal(10_000))

    def test_children_are_independent_of_parent_draws(self) -> None:
        """Test that consuming the parent does not shift a child stream."""
        a = Rng(7)
        a.normal(100)
        b = Rng(7)
        np.testing.assert_array_equal(a.child("x").normal(5), b.child("x").normal(5))

    def test_named_children_differ(self) -> None:
        """Test that different child keys give different streams."""
        rng = Rng(7)
        assert not np.array_equal(rng.child("a").normal(5), rng.child("b").normal(5))

    def test_negative_seed_rejected(self) -> None:
        """Test that negative seeds are rejected."""
        with pytest.raises(ValueError, match="non-negative"):
            Rng(-1)

    def test_bernoulli_mask_values(self) -> None:
        """Test that masks contain only 0 and 1."""
        mask = Rng(0).bernoulli((50, 4), keep=0.7)
        assert set(np.unique(mask)) <= {0.0, 1.0}
