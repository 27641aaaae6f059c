"""Mini-batch training with AdaDelta, early stopping on target-dev accuracy."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from loguru import logger

from dauto.config.schema import TrainConfig
from dauto.data import DomainPairDataset
from dauto.eval.metrics import accuracy
from dauto.model.network import DautoModel
from dauto.model.objective import joint_loss
from dauto.optim import AdaDeltaState, NonFiniteGradientError, adadelta_step
from dauto.tensor import Matrix, Rng, ShapeError

StopReason = Literal["max_epochs", "early_stopping", "diverged"]


@dataclass
class EpochRecord:
    """Mean per-step losses over one epoch and the dev accuracy after it."""

    epoch: int
    loss_y: float
    loss_r: float
    loss_d: float
    total: float
    dev_accuracy: float
    wall_time: float = field(default=0.0, compare=False)


@dataclass
class TrainTrace:
    """Everything a training run reports about itself."""

    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stop_reason: StopReason = "max_epochs"
    init_scheme: str = ""
    pretrain_losses: list[float] = field(default_factory=list)

    @property
    def best_dev_accuracy(self) -> float:
        if not self.epochs:
            return 0.0
        return self.epochs[self.best_epoch - 1].dev_accuracy


class TrainingDivergedError(RuntimeError):
    """Raised on a non-finite loss or gradient; `trace` holds the epochs completed so far."""

    def __init__(self, message: str, trace: TrainTrace) -> None:
        super().__init__(message)
        self.trace = trace


class EmptySourceLabelsError(ValueError):
    """Raised when the labeled source split has no rows."""
    pass


def _check_compatible(model: DautoModel, data: DomainPairDataset) -> None:
    if model.input_dim != data.dim:
        raise ShapeError(f"model input dim {model.input_dim} != dataset dim {data.dim}")
    if model.num_classes != data.num_classes:
        raise ShapeError(f"model has {model.num_classes} classes, dataset {data.num_classes}")


def _draw(pool: Matrix, k: int, rng: Rng) -> Matrix:
    n = pool.shape[0]
    if n == 0 or k == 0:
        return pool[:0]
    return pool[rng.choice(n, k, replace=n < k)]


def unlabeled_batch(
    data: DomainPairDataset, batch_size: int, rng: Rng
) -> tuple[Matrix, np.ndarray]:
    """Half source, half target unlabeled rows with domain tags 0/1."""
    half = batch_size // 2
    xs = _draw(data.source_unlabeled, half, rng)
    xt = _draw(data.target_unlabeled, batch_size - half, rng)
    tags = np.concatenate([
        np.zeros(xs.shape[0], dtype=np.int64), np.ones(xt.shape[0], dtype=np.int64)
    ])
    return np.vstack([xs, xt]), tags


def _apply(state: AdaDeltaState, model: DautoModel, grads: dict[str, Matrix],
           trace: TrainTrace, epoch: int) -> None:
    try:
        adadelta_step(state, model.parameters(), grads)
    except NonFiniteGradientError as e:
        trace.stop_reason = "diverged"
        raise TrainingDivergedError(f"diverged in epoch {epoch}: {e}", trace) from e


def pretrain_autoencoder(
    model: DautoModel, data: DomainPairDataset, cfg: TrainConfig
) -> list[float]:
    """
    Fit encoder and decoder on the unlabeled pool of both domains with reconstruction alone.

    Runs `cfg.pretrain_epochs` shuffled passes with a fresh AdaDelta state. The label
    predictor and domain head receive zero gradients and do not move.

    Returns:
        Mean reconstruction loss per pretraining epoch.
    """
    _check_compatible(model, data)
    recon_cfg = TrainConfig.model_validate(
        cfg.model_dump() | {"mode": "ae_only", "lam": 1.0, "mu": 0.0}
    )
    x_pool, tags = data.unlabeled_pool()
    if x_pool.shape[0] == 0:
        raise ValueError("autoencoder pretraining needs unlabeled instances")
    rng = Rng(cfg.seed).child("pretrain")
    order_rng, drop_rng = rng.child("order"), rng.child("dropout")
    state = AdaDeltaState.for_params(model.parameters(), cfg.rho, cfg.epsilon, cfg.lr)

    losses: list[float] = []
    for epoch in range(1, cfg.pretrain_epochs + 1):
        perm = order_rng.permutation(x_pool.shape[0])
        step_losses = []
        for start in range(0, perm.size, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            out = joint_loss(model, None, (x_pool[idx], tags[idx]), recon_cfg,
                             training=True, rng=drop_rng)
            if not math.isfinite(out.total):
                raise TrainingDivergedError(
                    f"pretraining diverged in epoch {epoch}", TrainTrace(pretrain_losses=losses)
                )
            adadelta_step(state, model.parameters(), out.grads)
            step_losses.append(out.parts.loss_r)
        losses.append(float(np.mean(step_losses)))
        logger.debug(f"pretrain epoch {epoch}: L_r={losses[-1]:.6g}")
    return losses


def train(
    model: DautoModel, data: DomainPairDataset, cfg: TrainConfig
) -> tuple[DautoModel, TrainTrace]:
    """
    Minimize the joint objective with AdaDelta and return the best-dev parameters.

    Every step pairs a labeled source batch with a 50/50 source/target unlabeled batch
    (drawn only when λ > 0 or μ > 0). Training stops after `max_epochs`, or after
    `patience` consecutive epochs without a strict dev-accuracy improvement
    (`patience=0` disables this). The model is updated in place.

    Raises:
        EmptySourceLabelsError: No labeled source rows.
        TrainingDivergedError: A loss or gradient became non-finite.
        ValueError: patience > 0 with an empty dev split.
    """
    _check_compatible(model, data)
    m = len(data.source_labeled)
    if m == 0:
        raise EmptySourceLabelsError("source_labeled is empty; nothing to train on")
    dev = data.target_dev
    if cfg.patience > 0 and len(dev) == 0:
        raise ValueError("early stopping needs a non-empty target dev split")

    trace = TrainTrace(init_scheme=model.init_scheme)
    if cfg.pretrain_epochs > 0 and cfg.lam > 0.0:
        trace.pretrain_losses = pretrain_autoencoder(model, data, cfg)

    rng = Rng(cfg.seed)
    order_rng = rng.child("labeled")
    unlabeled_rng = rng.child("unlabeled")
    drop_rng = rng.child("dropout")
    use_unlabeled = cfg.lam > 0.0 or cfg.mu > 0.0
    state = AdaDeltaState.for_params(model.parameters(), cfg.rho, cfg.epsilon, cfg.lr)

    best_acc = -math.inf
    best_params = model.snapshot()
    since_best = 0
    xs, ys = data.source_labeled

    for epoch in range(1, cfg.max_epochs + 1):
        started = time.perf_counter()
        perm = order_rng.permutation(m)
        sums = np.zeros(4)
        steps = 0
        for start in range(0, m, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            unlabeled = None
            if use_unlabeled:
                unlabeled = unlabeled_batch(data, cfg.batch_size, unlabeled_rng)
            out = joint_loss(model, (xs[idx], ys[idx]), unlabeled, cfg, training=True, rng=drop_rng)
            if not math.isfinite(out.total):
                trace.stop_reason = "diverged"
                logger.error(f"Non-finite loss in epoch {epoch} (total={out.total})")
                raise TrainingDivergedError(f"non-finite loss in epoch {epoch}", trace)
            _apply(state, model, out.grads, trace, epoch)
            sums += (out.parts.loss_y, out.parts.loss_r, out.parts.loss_d, out.total)
            steps += 1

        means = sums / steps
        dev_acc = accuracy(model.predict(dev.x), dev.y) if len(dev) else 0.0
        trace.epochs.append(EpochRecord(
            epoch=epoch,
            loss_y=float(means[0]),
            loss_r=float(means[1]),
            loss_d=float(means[2]),
            total=float(means[3]),
            dev_accuracy=dev_acc,
            wall_time=time.perf_counter() - started,
        ))
        logger.debug(f"epoch {epoch}: L_y={means[0]:.4g} L_r={means[1]:.4g} "
                     f"L_d={means[2]:.4g} dev={dev_acc:.4f}")

        if dev_acc > best_acc or len(dev) == 0:
            best_acc = dev_acc
            trace.best_epoch = epoch
            best_params = model.snapshot()
            since_best = 0
        else:
            since_best += 1
            if cfg.patience > 0 and since_best >= cfg.patience:
                trace.stop_reason = "early_stopping"
                break

    model.restore(best_params)
    logger.info(f"Trained {cfg.mode} (λ={cfg.lam:g}, μ={cfg.mu:g}): {len(trace.epochs)} epochs, "
                f"best epoch {trace.best_epoch} dev={trace.best_dev_accuracy:.4f} "
                f"({trace.stop_reason})")
    return model, trace
