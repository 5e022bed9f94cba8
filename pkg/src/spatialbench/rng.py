"""Seedable deterministic random streams with per-item child derivation.

Child seeds are derived with SplitMix64 (a 64-bit bijective mixer), so
distinct item indices under one master seed can never collide.  The
per-stream generator is numpy's PCG64, which has a fixed, documented
algorithm and produces identical sequences on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 finalization step (bijective on 64-bit ints)."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def child_seed(seed: int, index: int) -> int:
    """Derive the 64-bit seed of child stream `index` of `seed`.

    Injective in `index` for a fixed seed: the map is splitmix64 applied
    to seed + (index+1)*GOLDEN, and splitmix64 is a bijection.
    """
    if index < 0:
        raise ValueError("child index must be non-negative")
    return splitmix64((seed + (index + 1) * _GOLDEN) & _MASK64)


class Rng:
    """Deterministic random stream: a PCG64 generator under a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._g = np.random.Generator(np.random.PCG64(self.seed))

    def child(self, index: int) -> "Rng":
        """Independent stream for item `index`; order of creation is irrelevant."""
        return Rng(child_seed(self.seed, index))

    def uniform(self, lo: float, hi: float) -> float:
        return float(self._g.uniform(lo, hi))

    def uniform_vec(self, lo: float, hi: float, n: int) -> np.ndarray:
        return self._g.uniform(lo, hi, n)

    def integers(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        return int(self._g.integers(lo, hi))

    def choice(self, seq):
        return seq[int(self._g.integers(len(seq)))]

    def sign(self) -> int:
        return 1 if self._g.integers(2) else -1

    def permutation(self, n: int) -> np.ndarray:
        return self._g.permutation(n)
