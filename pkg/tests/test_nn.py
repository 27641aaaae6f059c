"""Tests for layers and losses with manual backpropagation."""

import math

import numpy as np
import pytest

from dauto.nn import (
    AffineLayer,
    BackwardBeforeForwardError,
    Dropout,
    GradReversal,
    affine_backward,
    affine_forward,
    cross_entropy,
    grl_backward,
    grl_forward,
    one_hot,
    recon_loss,
    relu_backward,
    relu_forward,
    sigmoid_backward,
    sigmoid_forward,
    softmax_forward,
)
from dauto.tensor import Rng, ShapeError

STEP = 1e-5


def numeric_grad(f, x: np.ndarray) -> np.ndarray:
    """Central finite differences of scalar f with respect to every entry of x (in place)."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + STEP
        up = f()
        x[idx] = orig - STEP
        down = f()
        x[idx] = orig
        grad[idx] = (up - down) / (2 * STEP)
    return grad


def assert_grad_close(analytic: np.ndarray, numeric: np.ndarray) -> None:
    np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-7)


class TestAffine:
    """Tests for the affine layer."""

    def test_identity_weights(self) -> None:
        """Test that W=I, b=0 passes input through."""
        layer = AffineLayer(weight=np.eye(2), bias=np.zeros(2))
        np.testing.assert_array_equal(affine_forward(layer, np.array([[1.0, 2.0]])), [[1.0, 2.0]])

    def test_bias_gradient_is_column_sum(self) -> None:
        """Test that d_bias equals the column sum of d_out."""
        rng = Rng(0)
        layer = AffineLayer.create(3, 4, rng)
        layer.forward(rng.normal((5, 3)))
        d_out = rng.normal((5, 4))
        np.testing.assert_allclose(affine_backward(layer, d_out).d_bias, d_out.sum(axis=0))

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_differences(self, seed: int) -> None:
        """Test weight, bias and input gradients against central differences."""
        rng = Rng(seed)
        n, d_in, d_out = 1 + seed, 2 + seed, 8 - seed
        layer = AffineLayer.create(d_in, d_out, rng)
        x = rng.normal((n, d_in))
        r = rng.normal((n, d_out))

        def loss() -> float:
            return float(np.sum(layer.forward(x) * r))

        loss()
        grads = layer.backward(r)
        assert grads.d_weight.shape == layer.weight.shape
        assert grads.d_bias.shape == layer.bias.shape
        assert_grad_close(grads.d_weight, numeric_grad(loss, layer.weight))
        assert_grad_close(grads.d_bias, numeric_grad(loss, layer.bias))
        assert_grad_close(grads.d_input, numeric_grad(loss, x))

    def test_backward_before_forward(self) -> None:
        """Test that backward without a cached input is rejected."""
        layer = AffineLayer.create(2, 2, Rng(0))
        with pytest.raises(BackwardBeforeForwardError):
            layer.backward(np.zeros((1, 2)))

    def test_input_shape_mismatch(self) -> None:
        """Test that a wrong input width raises ShapeError."""
        layer = AffineLayer.create(3, 2, Rng(0))
        with pytest.raises(ShapeError):
            layer.forward(np.zeros((1, 4)))


class TestActivations:
    """Tests for ReLU, sigmoid and softmax."""

    def test_relu_forward(self) -> None:
        """Test max(0, x)."""
        np.testing.assert_array_equal(relu_forward(np.array([[-1.0, 0.0, 2.0]])), [[0, 0, 2]])

    def test_relu_backward_mask(self) -> None:
        """Test that gradients are masked where x <= 0."""
        out = relu_backward(np.array([[-1.0, 2.0]]), np.array([[5.0, 7.0]]))
        np.testing.assert_array_equal(out, [[0.0, 7.0]])

    def test_relu_finite_differences(self) -> None:
        """Test ReLU gradients away from the kink."""
        rng = Rng(4)
        x = rng.normal((4, 5))
        x = np.sign(x) * (np.abs(x) + 0.01)
        r = rng.normal((4, 5))

        def loss() -> float:
            return float(np.sum(relu_forward(x) * r))

        assert_grad_close(relu_backward(x, r), numeric_grad(loss, x))

    def test_sigmoid_finite_differences(self) -> None:
        """Test sigmoid gradients and overflow-free extremes."""
        rng = Rng(6)
        x = rng.normal((3, 3))
        r = rng.normal((3, 3))

        def loss() -> float:
            return float(np.sum(sigmoid_forward(x) * r))

        assert_grad_close(sigmoid_backward(sigmoid_forward(x), r), numeric_grad(loss, x))
        np.testing.assert_allclose(sigmoid_forward(np.array([[-1000.0, 1000.0]])), [[0.0, 1.0]])

    def test_softmax_uniform(self) -> None:
        """Test softmax of equal logits, including huge ones."""
        np.testing.assert_allclose(softmax_forward(np.array([[0.0, 0.0]])), [[0.5, 0.5]])
        out = softmax_forward(np.array([[1000.0, 1000.0]]))
        assert np.all(np.isfinite(out))
        np.testing.assert_allclose(out, [[0.5, 0.5]])

    def test_softmax_rows_normalized_and_shift_invariant(self) -> None:
        """Test row sums and invariance to adding a constant per row."""
        logits = Rng(8).normal((6, 4)) * 3
        probs = softmax_forward(logits)
        np.testing.assert_allclose(probs.sum(axis=1), np.ones(6), atol=1e-12)
        np.testing.assert_allclose(softmax_forward(logits + 7.5), probs, atol=1e-12)


class TestCrossEntropy:
    """Tests for the batch-mean cross-entropy."""

    def test_uniform_two_classes(self) -> None:
        """Test that a uniform prediction costs ln 2."""
        result = cross_entropy(np.full((3, 2), 0.5), one_hot(np.array([0, 1, 0]), 2))
        assert result.loss == pytest.approx(math.log(2.0))

    def test_perfect_prediction(self) -> None:
        """Test that probs equal to labels give zero loss."""
        labels = one_hot(np.array([1, 0]), 2)
        assert cross_entropy(labels.copy(), labels).loss == pytest.approx(0.0, abs=1e-12)

    def test_zero_probability_is_clamped_and_flagged(self) -> None:
        """Test the 1e-12 clamp at the true class."""
        result = cross_entropy(np.array([[1.0, 0.0]]), one_hot(np.array([1]), 2))
        assert result.clamped
        assert result.loss == pytest.approx(-math.log(1e-12))

    def test_logit_gradient_finite_differences(self) -> None:
        """Test d_logits against differences through softmax."""
        rng = Rng(12)
        logits = rng.normal((5, 3))
        labels = one_hot(np.array([0, 2, 1, 1, 0]), 3)

        def loss() -> float:
            return cross_entropy(softmax_forward(logits), labels).loss

        analytic = cross_entropy(softmax_forward(logits), labels).grad
        assert_grad_close(analytic, numeric_grad(loss, logits))

    def test_one_hot_range(self) -> None:
        """Test that out-of-range labels are rejected."""
        with pytest.raises(ValueError, match="labels must lie"):
            one_hot(np.array([0, 2]), 2)


class TestReconLoss:
    """Tests for reconstruction losses."""

    def test_zero_when_equal(self) -> None:
        """Test that a perfect reconstruction costs nothing."""
        x = Rng(0).normal((3, 4))
        assert recon_loss(x, x.copy()).loss == 0.0
        assert recon_loss(x, x.copy(), "l1").loss == 0.0

    def test_3_4_5(self) -> None:
        """Test squared-l2 and l1 on the 3-4-5 pair."""
        x, x_hat = np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])
        assert recon_loss(x, x_hat, "squared_l2").loss == 25.0
        assert recon_loss(x, x_hat, "l1").loss == 7.0

    def test_l1_subgradient_zero_at_ties(self) -> None:
        """Test that the l1 subgradient is 0 where x_hat == x."""
        x = np.array([[1.0, 2.0]])
        x_hat = np.array([[1.0, 3.0]])
        np.testing.assert_array_equal(recon_loss(x, x_hat, "l1").grad, [[0.0, 1.0]])

    def test_squared_l2_finite_differences(self) -> None:
        """Test the squared-l2 gradient with respect to x_hat."""
        rng = Rng(13)
        x, x_hat = rng.normal((4, 3)), rng.normal((4, 3))

        def loss() -> float:
            return recon_loss(x, x_hat).loss

        assert_grad_close(recon_loss(x, x_hat).grad, numeric_grad(loss, x_hat))

    def test_shape_mismatch(self) -> None:
        """Test that differing shapes are rejected."""
        with pytest.raises(ShapeError):
            recon_loss(np.zeros((2, 2)), np.zeros((2, 3)))


class TestGradReversal:
    """Tests for the gradient reversal layer."""

    def test_forward_is_identity(self) -> None:
        """Test that the forward pass returns its input unchanged."""
        z = Rng(0).normal((3, 2))
        np.testing.assert_array_equal(grl_forward(GradReversal(2.5), z), z)

    def test_mu_zero_blocks_gradient(self) -> None:
        """Test that mu=0 yields a zero gradient."""
        out = grl_backward(GradReversal(0.0), np.array([[2.0, -3.0]]))
        np.testing.assert_array_equal(out, np.zeros((1, 2)))

    def test_mu_one_negates(self) -> None:
        """Test the definition on a small example."""
        out = grl_backward(GradReversal(1.0), np.array([[2.0, -3.0]]))
        np.testing.assert_array_equal(out, [[-2.0, 3.0]])

    @pytest.mark.parametrize("mu", [0.0, 1.0, 0.3, 1e-8, 100.0])
    def test_backward_is_exactly_minus_mu(self, mu: float) -> None:
        """Test bitwise equality with -mu * d_out."""
        d_out = Rng(1).normal((4, 3))
        np.testing.assert_array_equal(grl_backward(GradReversal(mu), d_out), -mu * d_out)

    def test_negative_mu_rejected(self) -> None:
        """Test that a negative weight is rejected."""
        with pytest.raises(ValueError):
            GradReversal(-1.0)


class TestDropout:
    """Tests for inverted dropout."""

    def test_identity_outside_training(self) -> None:
        """Test that evaluation mode ignores the rate."""
        x = Rng(0).normal((4, 4))
        np.testing.assert_array_equal(Dropout(0.5).forward(x, Rng(1), training=False), x)

    def test_training_mask_and_backward(self) -> None:
        """Test that kept units are scaled by 1/keep and backward uses the same mask."""
        x = np.ones((200, 10))
        drop = Dropout(0.3)
        out = drop.forward(x, Rng(2), training=True)
        assert set(np.unique(out)) <= {0.0, 1.0 / 0.7}
        np.testing.assert_array_equal(drop.backward(np.ones_like(x)), out)

    def test_rate_range(self) -> None:
        """Test that rate 1.0 is rejected."""
        with pytest.raises(ValueError, match=r"\[0, 1\)"):
            Dropout(1.0)
