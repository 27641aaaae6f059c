"""Domain-pair dataset container, target splits and label-fraction subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from loguru import logger

from dauto.tensor import Matrix, Rng, ShapeError


class InsufficientDataError(ValueError):
    """Raised when a split or protocol needs more instances than are available."""
    pass


class LabeledSplit(NamedTuple):
    x: Matrix
    y: np.ndarray

    def __len__(self) -> int:  # type: ignore[override]
        return int(self.x.shape[0])


def labeled(x: Matrix, y: np.ndarray) -> LabeledSplit:
    """Build a split with float64 features and int64 labels."""
    return LabeledSplit(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.int64))


@dataclass(frozen=True)
class DomainPairDataset:
    """
    Everything a run sees of the two domains.

    Labels exist for the source only at training time; target labels are held back in the
    dev/test splits for model selection and evaluation.
    """

    source_labeled: LabeledSplit
    source_unlabeled: Matrix
    target_unlabeled: Matrix
    target_dev: LabeledSplit
    target_test: LabeledSplit
    num_classes: int

    def __post_init__(self) -> None:
        if self.num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {self.num_classes}")
        d = self.source_labeled.x.shape[1]
        blocks = {
            "source_labeled": self.source_labeled.x,
            "source_unlabeled": self.source_unlabeled,
            "target_unlabeled": self.target_unlabeled,
            "target_dev": self.target_dev.x,
            "target_test": self.target_test.x,
        }
        for name, x in blocks.items():
            if x.ndim != 2 or x.shape[1] != d:
                raise ShapeError(f"{name} has shape {x.shape}; expected (*, {d})")
        for name, split in (
            ("source_labeled", self.source_labeled),
            ("target_dev", self.target_dev),
            ("target_test", self.target_test),
        ):
            if split.y.shape != (split.x.shape[0],):
                raise ShapeError(f"{name}: {split.y.shape[0]} labels for {split.x.shape[0]} rows")
            if split.y.size and (split.y.min() < 0 or split.y.max() >= self.num_classes):
                raise ValueError(f"{name} labels outside [0, {self.num_classes})")

    @property
    def dim(self) -> int:
        return int(self.source_labeled.x.shape[1])

    def unlabeled_pool(self) -> tuple[Matrix, np.ndarray]:
        """Both unlabeled pools stacked, with domain tags 0 (source) and 1 (target)."""
        x = np.vstack([self.source_unlabeled, self.target_unlabeled])
        tags = np.concatenate([
            np.zeros(self.source_unlabeled.shape[0], dtype=np.int64),
            np.ones(self.target_unlabeled.shape[0], dtype=np.int64),
        ])
        return x, tags

    def summary(self) -> str:
        return (
            f"d={self.dim} classes={self.num_classes} "
            f"source_labeled={len(self.source_labeled)} "
            f"source_unlabeled={self.source_unlabeled.shape[0]} "
            f"target_unlabeled={self.target_unlabeled.shape[0]} "
            f"target_dev={len(self.target_dev)} target_test={len(self.target_test)}"
        )


def split_target(x: Matrix, y: np.ndarray, seed: int) -> tuple[LabeledSplit, LabeledSplit]:
    """
    Partition labeled target data 50/50 into dev and test by a seeded shuffle.

    The two index sets are disjoint and together cover every row; dev receives the
    extra row when the count is odd.

    Raises:
        InsufficientDataError: Fewer than 2 rows to split.
    """
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 target instances to split, got {n}")
    order = Rng(seed).child("split_target").permutation(n)
    half = (n + 1) // 2
    dev_idx = np.sort(order[:half])
    test_idx = np.sort(order[half:])
    return labeled(x[dev_idx], y[dev_idx]), labeled(x[test_idx], y[test_idx])


def stratified_indices(y: np.ndarray, fraction: float, seed: int) -> np.ndarray:
    """
    Sorted indices of a class-stratified subsample.

    Each class c keeps the first round(fraction · n_c) entries of its own seeded
    permutation, so a smaller fraction always selects a subset of a larger one.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    rng = Rng(seed).child("subsample")
    keep: list[np.ndarray] = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        order = rng.child(f"class-{int(c)}").permutation(members.size)
        k = int(math.floor(fraction * members.size + 0.5))
        if k == 0:
            raise InsufficientDataError(
                f"fraction {fraction} leaves no labeled instances of class {int(c)} "
                f"({members.size} available)"
            )
        keep.append(members[order[:k]])
    return np.sort(np.concatenate(keep))


def subsample_labels(ds: DomainPairDataset, fraction: float, seed: int) -> DomainPairDataset:
    """Reduce the labeled source set; unlabeled pools and target splits are untouched."""
    if fraction == 1.0:
        return ds
    idx = stratified_indices(ds.source_labeled.y, fraction, seed)
    logger.debug(f"Subsampled labeled source to {idx.size}/{len(ds.source_labeled)} "
                 f"(fraction={fraction})")
    src = ds.source_labeled
    return replace(ds, source_labeled=labeled(src.x[idx], src.y[idx]))
