"""The joint objective: label loss + λ·reconstruction loss − μ·domain loss.

The minus sign on the domain term never appears in an update rule. The domain
head receives the true gradient of its cross-entropy (it minimizes it), while the
gradient reaching the encoder passes through gradient reversal and arrives
multiplied by −μ (the encoder maximizes it). μ scales only that reversed path.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from dauto.config.schema import TrainConfig
from dauto.model.network import NUM_DOMAINS, DautoModel
from dauto.nn import GradReversal, cross_entropy, one_hot, recon_loss, softmax_forward
from dauto.tensor import Matrix, Rng, ShapeError


class DomainLossUndefinedError(ValueError):
    """Raised when the domain loss is requested on a batch holding a single domain."""
    pass


class LossParts(NamedTuple):
    loss_y: float
    loss_r: float
    loss_d: float


class JointLoss(NamedTuple):
    """Monitored total (L_y + λL_r + μL_d, plus weight decay), its parts, and gradients."""
    total: float
    parts: LossParts
    grads: dict[str, Matrix]


def _zero_grads(model: DautoModel) -> dict[str, Matrix]:
    return {name: np.zeros_like(value) for name, value in model.parameters().items()}


def joint_loss(
    model: DautoModel,
    labeled: tuple[Matrix, np.ndarray] | None,
    unlabeled: tuple[Matrix, np.ndarray] | None,
    cfg: TrainConfig,
    training: bool = False,
    rng: Rng | None = None,
) -> JointLoss:
    """
    Evaluate the joint objective and all parameter gradients on one step's batches.

    Args:
        model: The model; its layer caches are overwritten.
        labeled: (X_s, y_s) labeled source batch, or None to drop the label term.
        unlabeled: (X_u, domain_tags) with tags 0 = source, 1 = target. Only used
            when λ > 0 or μ > 0.
        cfg: Supplies λ, μ, the reconstruction norm and weight decay.
        training: Enables encoder dropout.
        rng: Dropout stream, required when dropout is active.

    Returns:
        JointLoss with monitoring total, per-term losses and gradients for every
        parameter (zeros for inactive heads).

    Raises:
        DomainLossUndefinedError: μ > 0 and the unlabeled batch holds one domain.
    """
    lam, mu = cfg.lam, cfg.mu
    use_unlabeled = lam > 0.0 or mu > 0.0
    if labeled is None and not use_unlabeled:
        raise ValueError("joint_loss needs a labeled batch or a positive λ/μ")

    if use_unlabeled:
        if unlabeled is None:
            raise ValueError("λ > 0 or μ > 0 requires an unlabeled batch")
        x_u, tags = unlabeled[0], np.asarray(unlabeled[1], dtype=np.int64)
        if tags.shape[0] != x_u.shape[0]:
            raise ShapeError(f"{tags.shape[0]} domain tags for {x_u.shape[0]} instances")
        if mu > 0.0 and np.unique(tags).size < NUM_DOMAINS:
            raise DomainLossUndefinedError(
                "domain loss undefined: unlabeled batch contains a single domain"
            )

    m = 0 if labeled is None else labeled[0].shape[0]
    parts: list[Matrix] = []
    if labeled is not None:
        parts.append(labeled[0])
    if use_unlabeled:
        parts.append(x_u)
    x = parts[0] if len(parts) == 1 else np.vstack(parts)

    grads = _zero_grads(model)
    model._check_input(x)
    z = model.encoder.forward(x, rng, training)
    dz = np.zeros_like(z)

    loss_y = loss_r = loss_d = 0.0
    if labeled is not None:
        z_s = z[:m]
        probs = softmax_forward(model.predictor.forward(z_s))
        ce = cross_entropy(probs, one_hot(labeled[1], model.num_classes))
        loss_y = ce.loss
        g = model.predictor.backward(ce.grad)
        grads["predictor.weight"] = g.d_weight
        grads["predictor.bias"] = g.d_bias
        dz[:m] += g.d_input

    if use_unlabeled:
        z_u = z[m:]
        if lam > 0.0:
            x_hat = model.decoder.forward(z_u)
            rec = recon_loss(x_u, x_hat, cfg.recon_norm)
            loss_r = rec.loss
            dec_grads, dz_r = model.decoder.backward(lam * rec.grad)
            for name, value in dec_grads.items():
                grads[f"decoder.{name}"] = value
            dz[m:] += dz_r
        if mu > 0.0:
            grl = GradReversal(mu)
            probs_d = softmax_forward(model.domain_head.forward(grl.forward(z_u)))
            ce_d = cross_entropy(probs_d, one_hot(tags, NUM_DOMAINS))
            loss_d = ce_d.loss
            g = model.domain_head.backward(ce_d.grad)
            grads["domain_head.weight"] = g.d_weight
            grads["domain_head.bias"] = g.d_bias
            dz[m:] += grl.backward(g.d_input)

    enc_grads, _ = model.encoder.backward(dz)
    for name, value in enc_grads.items():
        grads[f"encoder.{name}"] = value

    total = loss_y + lam * loss_r + mu * loss_d
    if cfg.weight_decay > 0.0:
        wd = cfg.weight_decay
        for name, value in model.parameters().items():
            if name.endswith(".weight"):
                grads[name] = grads[name] + wd * value
                total += 0.5 * wd * float(np.sum(value * value))

    return JointLoss(total=total, parts=LossParts(loss_y, loss_r, loss_d), grads=grads)
