"""Tests for the joint model, its objective, training, grid search and checkpoints."""

import math
from pathlib import Path

import numpy as np
import pytest

from dauto.config import ArchitectureConfig, SyntheticSpec, TrainConfig
from dauto.data import DomainPairDataset, labeled, make_synthetic
from dauto.data.synthetic import gaussian_blobs
from dauto.eval import accuracy
from dauto.kde import TransformedKde, bound_reports
from dauto.model import (
    CheckpointFormatError,
    DautoModel,
    DomainLossUndefinedError,
    EmptySourceLabelsError,
    Stack,
    TrainingDivergedError,
    TrainTrace,
    grid_search,
    init_model,
    joint_loss,
    load_checkpoint,
    save_checkpoint,
    train,
)
from dauto.nn import AffineLayer, cross_entropy, one_hot, softmax_forward
from dauto.optim import sgd_step
from dauto.tensor import Rng, ShapeError

STEP = 1e-5


def numeric_grad(f, x: np.ndarray) -> np.ndarray:
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


def small_model(d: int = 3, hidden: list[int] | None = None, classes: int = 2,
                seed: int = 0, dropout: float = 0.0) -> DautoModel:
    arch = ArchitectureConfig(hidden_dims=hidden or [4], dropout=dropout)
    return DautoModel.build(d, classes, arch, Rng(seed))


def relu_margin(model: DautoModel, x_lab: np.ndarray, x_unl: np.ndarray) -> float:
    """Smallest |pre-activation| over every ReLU the joint loss evaluates."""
    model.encoder.forward(x_lab)
    pre = list(model.encoder._pre)
    model.decoder.forward(model.encoder.forward(x_unl))
    pre += model.encoder._pre + model.decoder._pre[:-1]
    return min(float(np.abs(a).min()) for a in pre)


def kink_free_model(x_lab: np.ndarray, x_unl: np.ndarray, first_seed: int = 0,
                    **kwargs) -> DautoModel:
    """First model whose ReLUs all sit farther than 1e-3 from 0 on the given batches."""
    for seed in range(first_seed, first_seed + 200):
        model = small_model(seed=seed, **kwargs)
        if relu_margin(model, x_lab, x_unl) > 1e-3:
            return model
    raise AssertionError("no seed keeps every ReLU pre-activation away from 0")


def blob_pair(seed: int = 0, n: int = 40, shift: tuple[float, float] = (0.0, 0.0)):
    spec = SyntheticSpec(generator="gaussian_blobs_shift", shift=list(shift),
                         samples_per_domain=n, noise=0.1, seed=seed)
    return make_synthetic(spec)


def identity_autoencoder() -> DautoModel:
    """d=2, one hidden layer of 4 ReLU units that reconstructs any x exactly."""
    enc = AffineLayer(weight=np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
                      bias=np.zeros(4))
    dec = AffineLayer(weight=np.array([[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]),
                      bias=np.zeros(2))
    rng = Rng(0)
    return DautoModel(
        encoder=Stack([enc]),
        decoder=Stack([dec], linear_output=True),
        predictor=AffineLayer.create(4, 2, rng),
        domain_head=AffineLayer.create(4, 2, rng),
    )


def fast_cfg(mode: str = "no_adapt", **kwargs) -> TrainConfig:
    base = {"mode": mode, "batch_size": 8, "max_epochs": 4, "patience": 0}
    return TrainConfig(**(base | kwargs))


SMALL_ARCH = ArchitectureConfig(hidden_dims=[6])


class TestForward:
    """Tests for DautoModel.forward."""

    def test_zero_predictor_gives_uniform_probabilities(self) -> None:
        """Test that a zero-weight predictor yields 1/K everywhere."""
        model = small_model(classes=3)
        model.predictor.weight[...] = 0.0
        probs = model.predict_proba(Rng(1).normal((5, 3)))
        np.testing.assert_allclose(probs, np.full((5, 3), 1.0 / 3.0))

    def test_identity_autoencoder_reconstructs_exactly(self) -> None:
        """Test an embed/project autoencoder with D >= d."""
        x = Rng(2).normal((7, 2))
        np.testing.assert_allclose(identity_autoencoder().reconstruct(x), x, atol=1e-15, rtol=0)

    def test_inference_ignores_decoder_and_domain_head(self) -> None:
        """Test that scrambling g and the domain head leaves predictions bitwise identical."""
        model = small_model(hidden=[5, 3])
        x = Rng(3).normal((6, 3))
        before = model.predict_proba(x)
        for layer in [*model.decoder.layers, model.domain_head]:
            layer.weight[...] = Rng(9).normal(layer.weight.shape) * 100
        np.testing.assert_array_equal(model.predict_proba(x), before)

    def test_requested_outputs_only(self) -> None:
        """Test that unrequested heads come back as None."""
        out = small_model().forward(np.zeros((2, 3)), ("predict", "domain"))
        assert out.reconstruct is None
        assert out.predict.shape == (2, 2)
        assert out.domain.shape == (2, 2)

    def test_domain_output_is_head_on_representation(self) -> None:
        """Test that the domain head reads z unchanged; reversal lives only in the gradient."""
        model = small_model(hidden=[5, 3])
        x = Rng(4).normal((6, 3))
        expected = softmax_forward(model.domain_head.forward(model.represent(x)))
        np.testing.assert_array_equal(model.forward(x, "domain").domain, expected)
        assert not hasattr(model, "grl")

    def test_input_dimension_mismatch(self) -> None:
        """Test that a wrong input width is rejected."""
        with pytest.raises(ShapeError, match="input dim 3"):
            small_model().predict(np.zeros((2, 4)))

    def test_mirrored_decoder_shapes(self) -> None:
        """Test that the decoder mirrors 3 -> 5 -> 2 back to 3."""
        model = small_model(hidden=[5, 2])
        assert [lyr.weight.shape for lyr in model.encoder.layers] == [(5, 3), (2, 5)]
        assert [lyr.weight.shape for lyr in model.decoder.layers] == [(5, 2), (3, 5)]


class TestJointLoss:
    """Tests for joint_loss."""

    @pytest.fixture
    def batches(self):
        rng = Rng(11)
        lab = (rng.normal((5, 3)), np.array([0, 2, 1, 1, 0]))
        unl = (rng.normal((6, 3)), np.array([0, 0, 0, 1, 1, 1]))
        return lab, unl

    def test_no_weights_equals_plain_classifier(self, batches) -> None:
        """Test that λ=μ=0 gives exactly the gradients of an MLP classifier."""
        lab, unl = batches
        model = small_model(hidden=[4, 3], classes=3)
        out = joint_loss(model, lab, unl, fast_cfg("dauto"))

        z = model.encoder.forward(lab[0])
        ce = cross_entropy(softmax_forward(model.predictor.forward(z)), one_hot(lab[1], 3))
        head = model.predictor.backward(ce.grad)
        enc, _ = model.encoder.backward(head.d_input)

        assert out.total == ce.loss
        np.testing.assert_array_equal(out.grads["predictor.weight"], head.d_weight)
        np.testing.assert_array_equal(out.grads["predictor.bias"], head.d_bias)
        for name, value in enc.items():
            np.testing.assert_array_equal(out.grads[f"encoder.{name}"], value)
        for name, value in out.grads.items():
            if name.startswith(("decoder.", "domain_head.")):
                assert not value.any()

    def test_label_and_reconstruction_gradients(self, batches) -> None:
        """Test every gradient of L_y + λL_r against central differences."""
        lab, unl = batches
        model = kink_free_model(lab[0], unl[0], first_seed=5, hidden=[4, 3], classes=3)
        cfg = TrainConfig(mode="ae_only", lam=0.7)

        def loss() -> float:
            parts = joint_loss(model, lab, unl, cfg).parts
            return parts.loss_y + 0.7 * parts.loss_r

        grads = joint_loss(model, lab, unl, cfg).grads
        for name, value in model.parameters().items():
            np.testing.assert_allclose(
                grads[name], numeric_grad(loss, value), rtol=1e-4, atol=1e-7, err_msg=name
            )

    def test_zero_code_row_sits_on_decoder_kink(self, batches) -> None:
        """Test that a dead code row puts the first decoder layer exactly at 0."""
        lab, unl = batches
        model = small_model(hidden=[4, 3], classes=3)
        model.encoder.layers[-1].bias[...] = -1e3
        assert relu_margin(model, lab[0], unl[0]) == 0.0

    @pytest.mark.parametrize("instance", range(20))
    def test_composed_objective_gradients(self, instance: int) -> None:
        """Test all gradients of L_y + λL_r − μL_d on random small shapes."""
        gen = Rng(100 + instance).generator
        d = int(gen.integers(2, 9))
        hidden = [int(h) for h in gen.integers(3, 9, size=int(gen.integers(1, 3)))]
        classes = int(gen.integers(2, 5))
        lam, mu = float(gen.uniform(0.1, 2.0)), float(gen.uniform(0.1, 2.0))
        rng = Rng(200 + instance)
        lab = (rng.normal((5, d)), np.arange(5) % classes)
        unl = (rng.normal((6, d)), np.array([0, 1, 0, 1, 0, 1]))
        model = kink_free_model(lab[0], unl[0], first_seed=10 * instance, d=d,
                                hidden=hidden, classes=classes)
        cfg = TrainConfig(mode="dauto", lam=lam, mu=mu)
        grads = joint_loss(model, lab, unl, cfg).grads

        def objective() -> float:
            p = joint_loss(model, lab, unl, cfg).parts
            return p.loss_y + lam * p.loss_r - mu * p.loss_d

        def domain_loss() -> float:
            return joint_loss(model, lab, unl, cfg).parts.loss_d

        for name, value in model.parameters().items():
            target = domain_loss if name.startswith("domain_head.") else objective
            np.testing.assert_allclose(grads[name], numeric_grad(target, value),
                                       rtol=1e-4, atol=1e-7, err_msg=name)

    def test_domain_gradients(self, batches) -> None:
        """Test domain-head gradients of L_d and the reversed encoder gradient."""
        lab, unl = batches
        model = small_model(hidden=[4], classes=3, seed=6)
        lam, mu = 0.4, 0.5
        cfg = TrainConfig(mode="dauto", lam=lam, mu=mu)
        grads = joint_loss(model, lab, unl, cfg).grads
        params = model.parameters()

        def domain_loss() -> float:
            return joint_loss(model, lab, unl, cfg).parts.loss_d

        def encoder_objective() -> float:
            p = joint_loss(model, lab, unl, cfg).parts
            return p.loss_y + lam * p.loss_r - mu * p.loss_d

        for name in ("domain_head.weight", "domain_head.bias"):
            np.testing.assert_allclose(grads[name], numeric_grad(domain_loss, params[name]),
                                       rtol=1e-4, atol=1e-7, err_msg=name)
        for name in ("encoder.0.weight", "encoder.0.bias"):
            np.testing.assert_allclose(grads[name], numeric_grad(encoder_objective, params[name]),
                                       rtol=1e-4, atol=1e-7, err_msg=name)

    def test_monitored_total(self, batches) -> None:
        """Test that the total adds every term with a positive sign."""
        lab, unl = batches
        out = joint_loss(small_model(classes=3), lab, unl, TrainConfig(lam=0.3, mu=2.0))
        p = out.parts
        assert out.total == pytest.approx(p.loss_y + 0.3 * p.loss_r + 2.0 * p.loss_d)

    def test_perfect_autoencoder_has_zero_reconstruction_gradient(self) -> None:
        """Test that an exact reconstruction leaves no gradient even for huge λ."""
        x = Rng(4).normal((8, 2))
        tags = np.array([0, 1] * 4)
        out = joint_loss(identity_autoencoder(), None, (x, tags),
                         TrainConfig(mode="ae_only", lam=1e8))
        assert out.parts.loss_r == 0.0
        for name, value in out.grads.items():
            assert not value.any(), name

    def test_single_domain_batch_with_mu(self, batches) -> None:
        """Test that μ > 0 on one domain raises the undefined-loss error."""
        lab, (x_u, _) = batches
        with pytest.raises(DomainLossUndefinedError, match="domain loss undefined"):
            joint_loss(small_model(classes=3), lab, (x_u, np.zeros(6, dtype=int)),
                       TrainConfig(mode="dann", mu=1.0))

    def test_single_domain_batch_without_mu(self, batches) -> None:
        """Test that reconstruction alone accepts a one-domain batch."""
        lab, (x_u, _) = batches
        out = joint_loss(small_model(classes=3), lab, (x_u, np.ones(6, dtype=int)),
                         TrainConfig(mode="ae_only", lam=1.0))
        assert out.parts.loss_r > 0.0

    def test_weight_decay(self, batches) -> None:
        """Test that weight decay adds wd·W to weight gradients only."""
        lab, _ = batches
        model = small_model(classes=3)
        plain = joint_loss(model, lab, None, TrainConfig(mode="no_adapt"))
        decayed = joint_loss(model, lab, None, TrainConfig(mode="no_adapt", weight_decay=0.1))
        w = model.predictor.weight
        np.testing.assert_allclose(
            decayed.grads["predictor.weight"], plain.grads["predictor.weight"] + 0.1 * w
        )
        np.testing.assert_array_equal(decayed.grads["predictor.bias"],
                                      plain.grads["predictor.bias"])


class TestMinimaxDirection:
    """The two players of the adversarial game move in opposite directions."""

    @pytest.fixture
    def setup(self):
        rng = Rng(21)
        x = np.vstack([rng.normal((10, 2), std=0.3) + [-2.0, 0.0],
                       rng.normal((10, 2), std=0.3) + [2.0, 0.0]])
        tags = np.repeat([0, 1], 10)
        return small_model(d=2, hidden=[6], seed=3), (x, tags), TrainConfig(mode="dann", mu=1.0)

    def test_domain_head_descends(self, setup) -> None:
        """Test that head-only steps strictly decrease L_d for 20 steps."""
        model, unl, cfg = setup
        params = model.parameters()
        head = {k: params[k] for k in ("domain_head.weight", "domain_head.bias")}
        prev = joint_loss(model, None, unl, cfg).parts.loss_d
        for _ in range(20):
            grads = joint_loss(model, None, unl, cfg).grads
            sgd_step(head, {k: grads[k] for k in head}, 0.05)
            loss = joint_loss(model, None, unl, cfg).parts.loss_d
            assert loss < prev
            prev = loss

    def test_encoder_ascends_through_reversal(self, setup) -> None:
        """Test that encoder-only steps strictly increase L_d for 20 steps."""
        model, unl, cfg = setup
        params = model.parameters()
        enc = {k: v for k, v in params.items() if k.startswith("encoder.")}
        prev = joint_loss(model, None, unl, cfg).parts.loss_d
        for _ in range(20):
            grads = joint_loss(model, None, unl, cfg).grads
            sgd_step(enc, {k: grads[k] for k in enc}, 0.01)
            loss = joint_loss(model, None, unl, cfg).parts.loss_d
            assert loss > prev
            prev = loss


class TestReconstructionBoundLink:
    """λ·L_r + c upper-bounds the mean KDE negative log-likelihood of a batch."""

    @pytest.mark.parametrize("w", [0.3, 1.0, 2.5])
    def test_reconstruction_loss_bounds_mean_nll(self, w: float) -> None:
        """Test the surrogate inequality at random parameters."""
        model = small_model(d=3, hidden=[4, 2], seed=8)
        x = Rng(9).normal((12, 3))
        tags = np.repeat([0, 1], 6)
        cfg = TrainConfig(mode="ae_only", lam=1.0)
        loss_r = joint_loss(model, None, (x, tags), cfg).parts.loss_r
        est = TransformedKde("gaussian", w, x, model.reconstruct)
        mean_nll = float(np.mean([r.nll_unnormalized for r in bound_reports(est)]))
        assert mean_nll <= loss_r / (2 * w * w) + math.log(12 * w) + 1e-12


class TestTrain:
    """Tests for the training loop."""

    def test_separable_blobs_reach_perfect_train_accuracy(self) -> None:
        """Test that no_adapt fits two separable blobs within 50 epochs."""
        rng = Rng(1)
        x, y = gaussian_blobs(100, 0.1, rng)
        empty = labeled(np.zeros((0, 2)), np.zeros(0))
        data = DomainPairDataset(labeled(x, y), x, x, empty, labeled(x, y), 2)
        model = init_model(data, ArchitectureConfig(hidden_dims=[8]), 0)
        cfg = TrainConfig(mode="no_adapt", batch_size=4, max_epochs=50, patience=0)
        model, trace = train(model, data, cfg)
        assert len(trace.epochs) == 50
        assert accuracy(model.predict(x), y) == 1.0

    def test_small_regularizers_do_not_hurt_a_trivial_task(self) -> None:
        """Test dauto with λ=μ=1e-3 stays within 0.02 of no_adapt on dev."""
        data = blob_pair(seed=2, n=60)
        base = {"batch_size": 8, "max_epochs": 30, "patience": 0}
        _, plain = train(init_model(data, SMALL_ARCH, 0), data,
                         TrainConfig(mode="no_adapt", **base))
        _, joint = train(init_model(data, SMALL_ARCH, 0), data,
                         TrainConfig(mode="dauto", lam=1e-3, mu=1e-3, **base))
        assert joint.best_dev_accuracy >= plain.best_dev_accuracy - 0.02

    def test_patience_zero_runs_every_epoch(self) -> None:
        """Test that disabled early stopping runs exactly max_epochs."""
        data = blob_pair()
        _, trace = train(init_model(data, SMALL_ARCH, 0), data, fast_cfg(max_epochs=7))
        assert len(trace.epochs) == 7
        assert trace.stop_reason == "max_epochs"
        assert [e.epoch for e in trace.epochs] == list(range(1, 8))

    def test_restores_best_dev_epoch(self) -> None:
        """Test that the returned model scores the best dev accuracy of the trace."""
        data = blob_pair(seed=4, shift=(0.5, 0.5))
        model, trace = train(init_model(data, SMALL_ARCH, 0), data,
                             fast_cfg("dann", mu=0.1, max_epochs=6))
        assert trace.best_dev_accuracy == max(e.dev_accuracy for e in trace.epochs)
        assert accuracy(model.predict(data.target_dev.x), data.target_dev.y) == \
            trace.best_dev_accuracy

    def test_deterministic(self) -> None:
        """Test that a fixed seed reproduces the trace and parameters."""
        data = blob_pair(seed=5)
        cfg = fast_cfg("dauto", lam=0.1, mu=0.1)
        runs = [train(init_model(data, SMALL_ARCH, 3), data, cfg) for _ in range(2)]
        assert runs[0][1] == runs[1][1]
        for name, value in runs[0][0].parameters().items():
            np.testing.assert_array_equal(value, runs[1][0].parameters()[name])

    @pytest.mark.parametrize(
        ("mode", "lam", "mu"),
        [("no_adapt", 0.0, 0.0), ("dann", 0.0, 0.2), ("ae_only", 0.2, 0.0)],
    )
    def test_mode_flag_equals_explicit_zeroing(self, mode: str, lam: float, mu: float) -> None:
        """Test that each baseline mode matches dauto with the same zeroed weights."""
        data = blob_pair(seed=6)
        a = train(init_model(data, SMALL_ARCH, 1), data, fast_cfg(mode, lam=lam, mu=mu))
        b = train(init_model(data, SMALL_ARCH, 1), data, fast_cfg("dauto", lam=lam, mu=mu))
        assert a[1] == b[1]
        for name, value in a[0].parameters().items():
            np.testing.assert_array_equal(value, b[0].parameters()[name])

    def test_empty_source_labels(self) -> None:
        """Test that a dataset without labeled source rows is rejected."""
        full = blob_pair()
        empty = labeled(np.zeros((0, 2)), np.zeros(0))
        data = DomainPairDataset(empty, full.source_unlabeled, full.target_unlabeled,
                                 full.target_dev, full.target_test, 2)
        with pytest.raises(EmptySourceLabelsError):
            train(init_model(data, SMALL_ARCH, 0), data, fast_cfg())

    def test_patience_needs_dev_split(self) -> None:
        """Test that early stopping without dev data is rejected."""
        full = blob_pair()
        empty = labeled(np.zeros((0, 2)), np.zeros(0))
        data = DomainPairDataset(full.source_labeled, full.source_unlabeled,
                                 full.target_unlabeled, empty, full.target_test, 2)
        with pytest.raises(ValueError, match="dev split"):
            train(init_model(data, SMALL_ARCH, 0), data, fast_cfg(patience=3))

    def test_divergence_aborts_with_trace(self) -> None:
        """Test that a non-finite loss raises and carries the trace."""
        data = blob_pair()
        model = init_model(data, SMALL_ARCH, 0)
        model.predictor.weight[0, 0] = np.inf
        with pytest.raises(TrainingDivergedError) as exc:
            train(model, data, fast_cfg())
        assert exc.value.trace.stop_reason == "diverged"
        assert exc.value.trace.epochs == []

    def test_incompatible_model(self) -> None:
        """Test that a model built for another input dimension is rejected."""
        data = blob_pair()
        with pytest.raises(ShapeError):
            train(small_model(d=5), data, fast_cfg())

    def test_pretraining_lowers_reconstruction(self) -> None:
        """Test that autoencoder pretraining is recorded and reduces L_r."""
        data = blob_pair(seed=7, n=80)
        _, trace = train(init_model(data, SMALL_ARCH, 0), data,
                         fast_cfg("ae_only", lam=0.5, pretrain_epochs=15, max_epochs=1))
        assert len(trace.pretrain_losses) == 15
        assert trace.pretrain_losses[-1] < trace.pretrain_losses[0]


class TestGridSearch:
    """Tests for grid_search."""

    def test_single_cell_equals_train(self) -> None:
        """Test that a one-cell grid reproduces a direct training run."""
        data = blob_pair(seed=8)
        cfg = fast_cfg("dauto", seed=4)
        result = grid_search(data, cfg, [0.1], [0.2], SMALL_ARCH)
        _, trace = train(init_model(data, SMALL_ARCH, 4), data, cfg.with_weights(0.1, 0.2))
        assert result.best_index == 0
        assert result.best.trace == trace
        assert result.best.dev_accuracy == trace.best_dev_accuracy

    def test_zero_grid_equals_no_adapt(self) -> None:
        """Test that dauto on {0}x{0} degenerates to no_adapt."""
        data = blob_pair(seed=9)
        a = grid_search(data, fast_cfg("dauto"), [0.0], [0.0], SMALL_ARCH)
        b = grid_search(data, fast_cfg("no_adapt"), [0.0], [0.0], SMALL_ARCH)
        assert a.best.trace == b.best.trace
        assert a.test_accuracy == b.test_accuracy

    def test_selects_argmax_with_first_tie(self) -> None:
        """Test selection against an exhaustive scan of the returned cells."""
        data = blob_pair(seed=10, shift=(1.0, 0.0))
        result = grid_search(data, fast_cfg("dauto"), [0.0, 0.5], [0.0, 0.5], SMALL_ARCH)
        assert [(c.lam, c.mu) for c in result.cells] == [
            (0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)
        ]
        assert [c.seed for c in result.cells] == [0, 1, 2, 3]
        top = max(c.dev_accuracy for c in result.cells)
        assert result.best_index == min(c.index for c in result.cells if c.dev_accuracy == top)
        assert result.best_cfg.lam == result.best.lam
        assert all(c.model is None for c in result.cells if c.index != result.best_index)

    def test_failed_cell_recorded_and_search_continues(self, monkeypatch) -> None:
        """Test that a training failure in one cell does not stop the others."""
        import dauto.model.search as search

        real_train = search.train

        def flaky(model, data, cfg):
            if cfg.lam == 1.0:
                raise TrainingDivergedError("boom", TrainTrace(stop_reason="diverged"))
            return real_train(model, data, cfg)

        monkeypatch.setattr(search, "train", flaky)
        data = blob_pair(seed=11)
        result = grid_search(data, fast_cfg("ae_only"), [1.0, 0.1], [0.0], SMALL_ARCH)
        assert [c.ok for c in result.cells] == [False, True]
        assert "boom" in result.cells[0].error
        assert result.cells[0].trace.stop_reason == "diverged"
        assert result.best_index == 1
        assert result.test_accuracy is not None

    def test_every_cell_failing(self, monkeypatch) -> None:
        """Test that a fully failed search has no selection."""
        import dauto.model.search as search

        def broken(model, data, cfg):
            raise RuntimeError("nope")

        monkeypatch.setattr(search, "train", broken)
        result = grid_search(blob_pair(), fast_cfg(), [0.0], [0.0], SMALL_ARCH)
        assert result.best is None
        assert result.test_accuracy is None
        assert len(result.failures) == 1

    def test_concurrent_matches_serial(self) -> None:
        """Test that jobs > 1 gives the same per-cell scores."""
        data = blob_pair(seed=12)
        serial = grid_search(data, fast_cfg("dann"), [0.0], [0.1, 1.0], SMALL_ARCH, jobs=1)
        threaded = grid_search(data, fast_cfg("dann"), [0.0], [0.1, 1.0], SMALL_ARCH, jobs=2)
        assert [c.trace for c in serial.cells] == [c.trace for c in threaded.cells]
        assert serial.best_index == threaded.best_index

    def test_forbidden_weights(self) -> None:
        """Test that a positive λ under no_adapt is rejected up front."""
        with pytest.raises(ValueError, match="no_adapt"):
            grid_search(blob_pair(), fast_cfg("no_adapt"), [0.1], [0.0], SMALL_ARCH)

    def test_empty_grid(self) -> None:
        """Test that an empty grid is rejected."""
        with pytest.raises(ValueError, match="non-empty"):
            grid_search(blob_pair(), fast_cfg(), [], [0.0], SMALL_ARCH)


class TestCheckpoint:
    """Tests for DAUTO1 checkpoints."""

    def test_round_trip_is_bitwise(self, tmp_path: Path) -> None:
        """Test that every array and the prediction survive a save/load cycle."""
        model = small_model(d=4, hidden=[5, 3], classes=3, seed=2, dropout=0.25)
        path = save_checkpoint(model, tmp_path / "model.bin")
        loaded = load_checkpoint(path)
        assert list(loaded.parameters()) == list(model.parameters())
        for name, value in model.parameters().items():
            np.testing.assert_array_equal(loaded.parameters()[name], value)
        assert loaded.dropout_rate == 0.25
        x = Rng(1).normal((3, 4))
        np.testing.assert_array_equal(loaded.predict_proba(x), model.predict_proba(x))

    def test_starts_with_magic(self, tmp_path: Path) -> None:
        """Test the versioned header."""
        path = save_checkpoint(small_model(), tmp_path / "m.bin")
        assert path.read_bytes()[:6] == b"DAUTO1"

    def test_bad_magic(self, tmp_path: Path) -> None:
        """Test that other files are rejected."""
        path = tmp_path / "m.bin"
        path.write_bytes(b"NOTDAUTO" + bytes(64))
        with pytest.raises(CheckpointFormatError, match="not a DAUTO1"):
            load_checkpoint(path)

    def test_truncated(self, tmp_path: Path) -> None:
        """Test that a cut-off file reports truncation."""
        path = save_checkpoint(small_model(), tmp_path / "m.bin")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CheckpointFormatError, match="truncated"):
            load_checkpoint(path)

    def test_trailing_bytes(self, tmp_path: Path) -> None:
        """Test that extra data after the last array is rejected."""
        path = save_checkpoint(small_model(), tmp_path / "m.bin")
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(CheckpointFormatError, match="trailing"):
            load_checkpoint(path)
