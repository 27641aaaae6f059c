"""The DAuto model, its joint objective, training loop, grid search and checkpoints."""

from dauto.model.checkpoint import CheckpointFormatError, load_checkpoint, save_checkpoint
from dauto.model.network import NUM_DOMAINS, DautoModel, ForwardOutputs, Stack
from dauto.model.objective import DomainLossUndefinedError, JointLoss, LossParts, joint_loss
from dauto.model.search import (
    GridCell,
    GridSearchResult,
    grid_search,
    grids_for_mode,
    init_model,
)
from dauto.model.trainer import (
    EmptySourceLabelsError,
    EpochRecord,
    TrainingDivergedError,
    TrainTrace,
    pretrain_autoencoder,
    train,
    unlabeled_batch,
)

__all__ = [
    "NUM_DOMAINS",
    "CheckpointFormatError",
    "DautoModel",
    "DomainLossUndefinedError",
    "EmptySourceLabelsError",
    "EpochRecord",
    "ForwardOutputs",
    "GridCell",
    "GridSearchResult",
    "JointLoss",
    "LossParts",
    "Stack",
    "TrainTrace",
    "TrainingDivergedError",
    "grid_search",
    "grids_for_mode",
    "init_model",
    "joint_loss",
    "load_checkpoint",
    "pretrain_autoencoder",
    "save_checkpoint",
    "train",
    "unlabeled_batch",
]
