"""Versioned binary checkpoints.

Layout (all integers uint32 little-endian, all reals float64 little-endian):

    b"DAUTO1"
    L, dim_0 .. dim_{L-1}        input dim followed by the encoder hidden dims
    num_classes, num_domains
    dropout rate
    every weight and bias, encoder -> decoder -> predictor -> domain head,
    each layer's weight (row-major, out x in) before its bias
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from dauto.model.network import NUM_DOMAINS, DautoModel, Stack
from dauto.nn import AffineLayer, Dropout

MAGIC = b"DAUTO1"
_LE_F64 = np.dtype("<f8")


class CheckpointFormatError(ValueError):
    """Raised for a file that is not a readable DAUTO1 checkpoint."""
    pass


def save_checkpoint(model: DautoModel, path: Path) -> Path:
    """Write `model` to `path`; reading it back restores every array bitwise."""
    dims = [model.input_dim, *model.hidden_dims]
    header = struct.pack(f"<{len(dims) + 3}I", len(dims), *dims, model.num_classes, NUM_DOMAINS)
    chunks = [MAGIC, header, struct.pack("<d", model.dropout_rate)]
    for value in model.parameters().values():
        chunks.append(np.ascontiguousarray(value, dtype=_LE_F64).tobytes())
    path = Path(path)
    path.write_bytes(b"".join(chunks))
    return path


class _Reader:
    def __init__(self, raw: bytes, path: Path) -> None:
        self.raw = raw
        self.path = path
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.raw):
            raise CheckpointFormatError(f"{self.path}: truncated at byte {self.pos}")
        out = self.raw[self.pos:self.pos + n]
        self.pos += n
        return out

    def uint32(self, count: int = 1) -> tuple[int, ...]:
        return struct.unpack(f"<{count}I", self.take(4 * count))

    def array(self, shape: tuple[int, ...]) -> np.ndarray:
        n = int(np.prod(shape))
        return np.frombuffer(self.take(8 * n), dtype=_LE_F64).astype(np.float64).reshape(shape)

    def layer(self, in_dim: int, out_dim: int) -> AffineLayer:
        weight = self.array((out_dim, in_dim))
        return AffineLayer(weight=weight, bias=self.array((out_dim,)))


def load_checkpoint(path: Path) -> DautoModel:
    """
    Read a DAUTO1 checkpoint.

    Raises:
        CheckpointFormatError: Wrong magic, truncated data, or trailing bytes.
    """
    path = Path(path)
    reader = _Reader(path.read_bytes(), path)
    if reader.take(len(MAGIC)) != MAGIC:
        raise CheckpointFormatError(f"{path}: not a DAUTO1 checkpoint")
    (count,) = reader.uint32()
    if count < 2:
        raise CheckpointFormatError(f"{path}: need at least 2 layer dims, header says {count}")
    dims = list(reader.uint32(count))
    num_classes, num_domains = reader.uint32(2)
    if num_domains != NUM_DOMAINS:
        raise CheckpointFormatError(f"{path}: expected {NUM_DOMAINS} domains, got {num_domains}")
    (dropout,) = struct.unpack("<d", reader.take(8))

    encoder = [reader.layer(a, b) for a, b in zip(dims[:-1], dims[1:])]
    rev = dims[::-1]
    decoder = [reader.layer(a, b) for a, b in zip(rev[:-1], rev[1:])]
    predictor = reader.layer(dims[-1], num_classes)
    domain_head = reader.layer(dims[-1], num_domains)
    if reader.pos != len(reader.raw):
        raise CheckpointFormatError(f"{path}: {len(reader.raw) - reader.pos} trailing bytes")
    return DautoModel(
        encoder=Stack(encoder, dropout=Dropout(dropout)),
        decoder=Stack(decoder, linear_output=True),
        predictor=predictor,
        domain_head=domain_head,
        init_scheme="checkpoint",
    )
