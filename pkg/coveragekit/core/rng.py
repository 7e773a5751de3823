"""Reproducible random streams for synthetic data.

Each stream is NumPy's counter-based Philox generator keyed from
``SeedSequence(seed, spawn_key=key)``. Uniforms use the top 53 bits of each
raw 64-bit output as ``(k + 0.5) / 2**53``, so they lie strictly inside (0, 1).
Gaussians are the inverse normal CDF of those uniforms.
"""

from __future__ import annotations

import numpy as np
from scipy import special

_SCALE = 2.0 ** -53


class DeterministicStream:
    """Seeded stream of uniforms and standard normals."""

    def __init__(self, seed: int, *key: int):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key)
        self._bits = np.random.Philox(sequence)

    def uniform(self, size: int) -> np.ndarray:
        raw = self._bits.random_raw(int(size))
        k = np.asarray(raw, dtype=np.uint64) >> np.uint64(11)
        return (k.astype(np.float64) + 0.5) * _SCALE

    def normal(self, size: int) -> np.ndarray:
        return special.ndtri(self.uniform(size))

    def integers(self, low: int, high: int, size: int) -> np.ndarray:
        """Uniform integers in [low, high]."""
        span = high - low + 1
        return low + np.floor(self.uniform(size) * span).astype(np.int64)

    def bernoulli(self, rate: float, size: int) -> np.ndarray:
        return self.uniform(size) < rate
