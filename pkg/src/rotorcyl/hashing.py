"""Deterministic 64-bit hashing and a tiny counter-based RNG.

Everything random in this package (initial rotor orientations, random source
permutations, the stochastic walk baseline) is derived from a user seed
through the functions below, so that a run is a pure function of its seed and
independent of the order in which lattice rows happen to be instantiated.

The same arithmetic is implemented three times on purpose: on Python ints
(here), on numpy uint64 arrays (grid fill), and inside the numba kernels
(stream draws).  Unit tests pin all three to identical outputs.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# splitmix64 increment and the murmur3 fmix64 finalizer constants
GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xFF51AFD7ED558CCD
_C2 = 0xC4CEB9FE1A85EC53

# salt separating the source vertex from cell coordinates
SOURCE_KEY = 0xFFFFFFFFFFFFFFFF


def mix64(z: int) -> int:
    """Finalizing 64-bit mixer (murmur3 fmix64). Bijective on uint64."""
    z &= MASK64
    z ^= z >> 33
    z = (z * _C1) & MASK64
    z ^= z >> 33
    z = (z * _C2) & MASK64
    z ^= z >> 33
    return z


def cell_key(x: int, y: int) -> int:
    return ((y << 32) | x) & MASK64


def cell_hash(seed: int, x: int, y: int) -> int:
    """Uniform 64-bit value for lattice cell (x, y) under `seed`."""
    return mix64(mix64((seed & MASK64) ^ GOLDEN) ^ cell_key(x, y))


def source_hash(seed: int) -> int:
    """Uniform 64-bit value for the source vertex under `seed`."""
    return mix64(mix64((seed & MASK64) ^ GOLDEN) ^ SOURCE_KEY)


def cell_hash_grid(seed: int, rows: int, cols: int) -> np.ndarray:
    """Vectorized cell_hash over a (rows, cols) grid; entry [y, x] == cell_hash(seed, x, y)."""
    x = np.arange(cols, dtype=np.uint64)
    y = np.arange(rows, dtype=np.uint64) << np.uint64(32)
    key = y[:, None] | x[None, :]
    base = np.uint64(mix64((seed & MASK64) ^ GOLDEN))
    return _mix64_np(base ^ key)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(33))
    z = z * np.uint64(_C1)
    z = z ^ (z >> np.uint64(33))
    z = z * np.uint64(_C2)
    return z ^ (z >> np.uint64(33))


class Stream:
    """Counter-based pseudo-random stream: state += GOLDEN, output = mix64(state).

    Mirrors the draw loop used inside the numba kernels bit for bit.
    """

    def __init__(self, seed: int, tag: int = 0):
        self.state = mix64((seed & MASK64) ^ mix64(tag & MASK64))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform draw in [0, n). Modulo bias is ~n/2**64, irrelevant for small n."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> list:
        """Fisher-Yates shuffle, in place; returns `items` for convenience."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
