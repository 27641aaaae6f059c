"""Sparse bag-of-words text in the "label idx:val idx:val ..." line format."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from loguru import logger

from dauto.data.dataset import DomainPairDataset, labeled, split_target
from dauto.tensor import Matrix


class SparseFormatError(ValueError):
    """Raised for a malformed line; `line` is 1-based."""

    def __init__(self, path: Path, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def _parse_line(path: Path, lineno: int, text: str, dim: int, row: np.ndarray) -> int:
    tokens = text.split()
    try:
        label = int(float(tokens[0]))
    except (ValueError, OverflowError):
        raise SparseFormatError(path, lineno, f"unparsable label {tokens[0]!r}") from None
    prev = -1
    for token in tokens[1:]:
        idx_text, sep, val_text = token.partition(":")
        try:
            if not sep:
                raise ValueError
            idx = int(idx_text)
            val = float(val_text)
        except ValueError:
            raise SparseFormatError(path, lineno, f"unparsable token {token!r}") from None
        if not math.isfinite(val):
            raise SparseFormatError(path, lineno, f"non-finite value in {token!r}")
        if not 0 <= idx < dim:
            raise SparseFormatError(path, lineno, f"index {idx} outside [0, {dim})")
        if idx <= prev:
            raise SparseFormatError(
                path, lineno, f"index {idx} does not increase (previous {prev})"
            )
        row[idx] = val
        prev = idx
    return label


def load_sparse_text(
    path: Path, dim: int, tf_normalize: bool = False
) -> tuple[Matrix, np.ndarray]:
    """
    Read a sparse text file into dense rows.

    Args:
        path: One instance per LF-terminated line; blank lines are skipped.
        dim: Feature dimension; indices must lie in [0, dim) and strictly increase.
        tf_normalize: Divide each nonzero row by its sum.

    Returns:
        (X, labels) with labels exactly as written in the file.

    Raises:
        SparseFormatError: Out-of-range or non-monotone index, unparsable or
            non-finite token, or a non-ASCII byte.
    """
    path = Path(path)
    if dim <= 0:
        raise ValueError(f"dim must be positive, got {dim}")
    rows: list[np.ndarray] = []
    labels: list[int] = []
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, start=1):
            try:
                text = raw.decode("ascii")
            except UnicodeDecodeError as e:
                raise SparseFormatError(
                    path, lineno, f"non-ASCII byte 0x{raw[e.start]:02x} at column {e.start + 1}"
                ) from None
            if not text.strip():
                continue
            row = np.zeros(dim, dtype=np.float64)
            labels.append(_parse_line(path, lineno, text, dim, row))
            rows.append(row)

    x = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float64)
    if tf_normalize and x.shape[0]:
        totals = x.sum(axis=1, keepdims=True)
        x = np.divide(x, totals, out=x.copy(), where=totals != 0)
    logger.debug(f"Loaded {x.shape[0]} sparse rows (dim={dim}) from {path.name}")
    return x, np.asarray(labels, dtype=np.int64)


def binarize_labels(labels: np.ndarray) -> np.ndarray:
    """Sentiment labels: <= 0 is class 0, > 0 is class 1."""
    return (np.asarray(labels) > 0).astype(np.int64)


def sparse_domain_pair(
    source_path: Path,
    target_path: Path,
    dim: int,
    seed: int,
    tf_normalize: bool = False,
) -> DomainPairDataset:
    """
    Two review domains as a binary adaptation task.

    Every source line is labeled training data and also joins the source unlabeled
    pool; every target line joins the target unlabeled pool, and its held-back label
    decides the dev/test split it lands in.
    """
    xs, ys = load_sparse_text(source_path, dim, tf_normalize)
    xt, yt = load_sparse_text(target_path, dim, tf_normalize)
    ys, yt = binarize_labels(ys), binarize_labels(yt)
    dev, test = split_target(xt, yt, seed)
    return DomainPairDataset(
        source_labeled=labeled(xs, ys),
        source_unlabeled=xs,
        target_unlabeled=xt,
        target_dev=dev,
        target_test=test,
        num_classes=2,
    )
