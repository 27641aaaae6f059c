"""IDX image/label binaries (the MNIST distribution format)."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from loguru import logger

from dauto.tensor import Matrix

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """Raised for malformed IDX content; `offset` is the byte where parsing failed."""

    def __init__(self, path: Path, offset: int, message: str) -> None:
        super().__init__(f"{path}: byte {offset}: {message}")
        self.path = path
        self.offset = offset


def _read_header(path: Path, raw: bytes, magic: int, ndim: int) -> tuple[int, ...]:
    header_len = 4 + 4 * ndim
    if len(raw) < 4:
        raise IdxFormatError(path, len(raw), "truncated before magic number")
    (found,) = struct.unpack(">I", raw[:4])
    if found != magic:
        raise IdxFormatError(path, 0, f"bad magic 0x{found:08x}, expected 0x{magic:08x}")
    if len(raw) < header_len:
        raise IdxFormatError(path, len(raw), "truncated inside dimension header")
    dims = struct.unpack(f">{ndim}I", raw[4:header_len])
    expected = header_len + int(np.prod(dims, dtype=np.int64))
    if len(raw) < expected:
        raise IdxFormatError(path, len(raw), f"truncated payload: need {expected} bytes")
    return dims


def read_idx_images(path: Path) -> Matrix:
    """(count, rows·cols) matrix of raw pixel values 0..255 as float64."""
    raw = Path(path).read_bytes()
    count, rows, cols = _read_header(path, raw, IMAGES_MAGIC, 3)
    pixels = np.frombuffer(raw, dtype=np.uint8, count=count * rows * cols, offset=16)
    return pixels.reshape(count, rows * cols).astype(np.float64)


def read_idx_labels(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    (count,) = _read_header(path, raw, LABELS_MAGIC, 1)
    return np.frombuffer(raw, dtype=np.uint8, count=count, offset=8).astype(np.int64)


def load_idx(images_path: Path, labels_path: Path) -> tuple[Matrix, np.ndarray]:
    """
    Load an image/label file pair.

    Args:
        images_path: IDX3 file (magic 0x00000803, big-endian count/rows/cols, uint8 pixels).
        labels_path: IDX1 file (magic 0x00000801, big-endian count, uint8 labels).

    Returns:
        (X, y): flattened images scaled to [0, 1] by 1/255, and integer labels.

    Raises:
        FileNotFoundError: Either file is missing.
        IdxFormatError: Bad magic, truncation, or image/label count mismatch.
    """
    images_path, labels_path = Path(images_path), Path(labels_path)
    for p in (images_path, labels_path):
        if not p.is_file():
            raise FileNotFoundError(f"IDX file not found: {p}")
    x = read_idx_images(images_path) / 255.0
    y = read_idx_labels(labels_path)
    if x.shape[0] != y.shape[0]:
        raise IdxFormatError(
            labels_path, 4, f"label count {y.shape[0]} does not match image count {x.shape[0]}"
        )
    logger.debug(f"Loaded {x.shape[0]} images of dim {x.shape[1]} from {images_path.name}")
    return x, y


def write_idx(
    images: np.ndarray, labels: np.ndarray, images_path: Path, labels_path: Path
) -> None:
    """
    Write images (count, rows, cols) of uint8 pixels and their labels as IDX files.

    Flat (count, rows·cols) images are accepted when rows·cols is a perfect square.
    """
    imgs = np.asarray(images)
    if imgs.ndim == 2:
        side = int(round(np.sqrt(imgs.shape[1])))
        if side * side != imgs.shape[1]:
            raise ValueError(f"cannot infer square image shape from width {imgs.shape[1]}")
        imgs = imgs.reshape(imgs.shape[0], side, side)
    if imgs.ndim != 3:
        raise ValueError(f"images must be (count, rows, cols), got {imgs.shape}")
    lbls = np.asarray(labels).reshape(-1)
    if lbls.shape[0] != imgs.shape[0]:
        raise ValueError(f"{lbls.shape[0]} labels for {imgs.shape[0]} images")
    if imgs.min(initial=0) < 0 or imgs.max(initial=0) > 255 or lbls.min(initial=0) < 0 \
            or lbls.max(initial=0) > 255:
        raise ValueError("IDX values must fit in an unsigned byte")

    count, rows, cols = imgs.shape
    Path(images_path).write_bytes(
        struct.pack(">4I", IMAGES_MAGIC, count, rows, cols) + imgs.astype(np.uint8).tobytes()
    )
    Path(labels_path).write_bytes(
        struct.pack(">2I", LABELS_MAGIC, count) + lbls.astype(np.uint8).tobytes()
    )
