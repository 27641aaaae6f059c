"""Seeded, splittable pseudo-randomness.

Wraps numpy's counter-based Philox bit generator. Streams depend only on the seed
(and the spawn path for children), never on the platform or on global state.
"""

from __future__ import annotations

import zlib

import numpy as np
import numpy.typing as npt


class Rng:
    """
    Single-owner random stream.

    Children derived with `child(key)` are independent of the parent's draws and
    of each other, so one component's consumption never shifts another's stream.
    """

    def __init__(self, seed: int, _spawn_key: tuple[int, ...] = ()) -> None:
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.spawn_key = _spawn_key
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=_spawn_key)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, spawn_key={self.spawn_key})"

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def child(self, key: int | str) -> Rng:
        """Derive an independent stream addressed by `key` (names hash through crc32)."""
        if isinstance(key, str):
            key = zlib.crc32(key.encode("utf-8"))
        return Rng(self.seed, (*self.spawn_key, int(key)))

    def normal(self, size: int | tuple[int, ...], std: float = 1.0) -> npt.NDArray[np.float64]:
        return self._generator.normal(0.0, std, size=size)

    def uniform(
        self, size: int | tuple[int, ...], low: float = 0.0, high: float = 1.0
    ) -> npt.NDArray[np.float64]:
        return self._generator.uniform(low, high, size=size)

    def permutation(self, n: int) -> npt.NDArray[np.int64]:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = False) -> npt.NDArray[np.int64]:
        return self._generator.choice(n, size=size, replace=replace)

    def bernoulli(self, shape: tuple[int, ...], keep: float) -> npt.NDArray[np.float64]:
        """0/1 mask with P(1) = keep."""
        return (self._generator.random(shape) < keep).astype(np.float64)
