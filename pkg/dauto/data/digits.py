"""Digit-image protocols built on IDX files: binary one-vs-rest tasks and 10-class domains."""

from __future__ import annotations

from collections.abc import Iterable
from pathlib import Path

import numpy as np
from loguru import logger

from dauto.data.dataset import DomainPairDataset, InsufficientDataError, labeled, split_target
from dauto.data.idx import load_idx
from dauto.tensor import Matrix, Rng

TRAIN_FILES = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")
TEST_FILES = ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")

TRAIN_POSITIVES = 500
TRAIN_NEGATIVES = 500
TEST_POSITIVES = 750
TEST_NEGATIVES = 750


def load_idx_split(root: Path, split: str) -> tuple[Matrix, np.ndarray]:
    """Load `train` or `test` from a directory holding the standard IDX file names."""
    names = TRAIN_FILES if split == "train" else TEST_FILES
    return load_idx(Path(root) / names[0], Path(root) / names[1])


def binary_digit_task(
    x: Matrix,
    y: np.ndarray,
    positive_digit: int,
    excluded_digits: Iterable[int],
    n_positive: int = TRAIN_POSITIVES,
    n_negative: int = TRAIN_NEGATIVES,
    seed: int = 0,
    fill_negatives: bool = False,
) -> tuple[Matrix, np.ndarray]:
    """
    One-vs-rest digit task: is this image `positive_digit`?

    Positives are images of the chosen digit; negatives are drawn only from digits
    outside `excluded_digits`. Rows keep their original relative order.

    Args:
        fill_negatives: Take every available negative when fewer than `n_negative`
            exist instead of failing.

    Returns:
        (X', y') with y' = 1 for the positive digit and 0 otherwise.

    Raises:
        InsufficientDataError: Too few positives, or too few negatives without
            `fill_negatives`.
    """
    y = np.asarray(y)
    if y.size and (y.min() < 0 or y.max() > 9):
        raise ValueError("digit labels must lie in 0..9")
    excluded = set(int(d) for d in excluded_digits)
    rng = Rng(seed).child(f"digit-{positive_digit}")

    positives = np.flatnonzero(y == positive_digit)
    negatives = np.flatnonzero(~np.isin(y, sorted(excluded | {positive_digit})))
    if positives.size < n_positive:
        raise InsufficientDataError(
            f"requested {n_positive} images of digit {positive_digit}, "
            f"only {positives.size} available"
        )
    if negatives.size < n_negative:
        if not fill_negatives:
            raise InsufficientDataError(
                f"requested {n_negative} negatives outside {sorted(excluded)}, "
                f"only {negatives.size} available"
            )
        logger.info(f"Digit {positive_digit}: filling {negatives.size} of {n_negative} negatives")
        n_negative = negatives.size

    pos = positives[rng.child("pos").choice(positives.size, n_positive)]
    neg = negatives[rng.child("neg").choice(negatives.size, n_negative)]
    idx = np.sort(np.concatenate([pos, neg]))
    return x[idx], (y[idx] == positive_digit).astype(np.int64)


def digit_domain_pair(
    train: tuple[Matrix, np.ndarray],
    test: tuple[Matrix, np.ndarray],
    source_digit: int,
    target_digit: int,
    excluded_digits: Iterable[int],
    seed: int,
) -> DomainPairDataset:
    """
    The binary digit adaptation task `source_digit -> target_digit`.

    Source: 1000 labeled training images (500 positives). Target: 1000 unlabeled
    training images for the target digit, plus up to 1500 test images (750 positives)
    split 50/50 into dev and test. When the digits coincide the labeled source set
    is target-domain data, which gives the in-domain reference score.
    """
    excluded = list(excluded_digits)
    xs, ys = binary_digit_task(*train, source_digit, excluded, seed=seed)
    xu, _ = binary_digit_task(*train, target_digit, excluded, seed=seed + 1)
    xe, ye = binary_digit_task(
        *test, target_digit, excluded,
        n_positive=TEST_POSITIVES, n_negative=TEST_NEGATIVES, seed=seed, fill_negatives=True,
    )
    logger.info(f"Digits {source_digit}->{target_digit}: source={xs.shape[0]} "
                f"target_unlabeled={xu.shape[0]} target_eval={xe.shape[0]} "
                f"(positives={int(ye.sum())})")
    dev, test_split = split_target(xe, ye, seed)
    return DomainPairDataset(
        source_labeled=labeled(xs, ys),
        source_unlabeled=xs.copy(),
        target_unlabeled=xu,
        target_dev=dev,
        target_test=test_split,
        num_classes=2,
    )


def multiclass_domain_pair(
    source_root: Path, target_root: Path, seed: int
) -> DomainPairDataset:
    """
    10-class transfer between two digit collections stored as IDX directories.

    Both collections must share an image size. The whole source training split is
    labeled; the target training split is the unlabeled pool and its test split is
    divided into dev and test.
    """
    xs, ys = load_idx_split(source_root, "train")
    xt, _ = load_idx_split(target_root, "train")
    xe, ye = load_idx_split(target_root, "test")
    dev, test = split_target(xe, ye, seed)
    return DomainPairDataset(
        source_labeled=labeled(xs, ys),
        source_unlabeled=xs,
        target_unlabeled=xt,
        target_dev=dev,
        target_test=test,
        num_classes=10,
    )
