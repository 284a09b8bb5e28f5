"""Counter-based 64-bit random number generation.

The generator is a SplitMix64-style counter scheme: draw ``i`` from stream
``key`` is ``finalize(key + (i + 1) * GAMMA)`` where ``finalize`` is the
standard 64-bit avalanche (constants from the SplitMix64 finalizer).  Streams
are stateless functions of (key, counter), so independent substreams are
derived by key mixing rather than by jumping, and trial i of scenario s can
own stream (seed, s, i) with no overlap bookkeeping.

Identical seeds reproduce identical draws on every platform: all arithmetic
is modulo 2**64 and uniforms are built from the top 53 bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15   # golden-ratio increment
MIX_M1 = 0xBF58476D1CE4E5B9  # SplitMix64 finalizer multipliers
MIX_M2 = 0x94D049BB133111EB
DERIVE_SALT = 0xD1B54A32D192ED03  # arbitrary odd constant for substream keys

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """64-bit avalanche of ``z`` (SplitMix64 finalizer), pure-int arithmetic."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_M1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_M2) & MASK64
    return z ^ (z >> 31)


def derive_key(parent: int, index: int) -> int:
    """Key of substream ``index`` of the stream keyed by ``parent``."""
    return mix64((parent & MASK64) ^ mix64(((index & MASK64) + DERIVE_SALT) & MASK64))


def key_from_parts(*parts: int) -> int:
    """Fold an ordered tuple of integers into one stream key."""
    key = mix64(GAMMA)
    for part in parts:
        key = derive_key(key, part)
    return key


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a UTF-8 string; stable tag for named streams."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & MASK64
    return h


def raw_draw(key: int, counter: int) -> int:
    """The ``counter``-th 64-bit word of stream ``key``."""
    return mix64((key + ((counter + 1) * GAMMA)) & MASK64)


def uniform_draw(key: int, counter: int) -> float:
    """Uniform on [0, 1) from the top 53 bits of the counter word."""
    return (raw_draw(key, counter) >> 11) * _INV_2_53


def uniform_block(key: int, start: int, count: int) -> np.ndarray:
    """Vectorized uniforms for counters start .. start+count-1 (numpy path)."""
    ctr = np.arange(start, start + count, dtype=np.uint64)
    z = np.uint64(key) + (ctr + np.uint64(1)) * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_M2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def gaussian_block(key: int, count: int, start_counter: int = 0) -> np.ndarray:
    """``count`` standard normals; value i consumes counters 2i and 2i+1.

    Box-Muller on (1-u1, u2]; 1-u1 in (0, 1] keeps the log finite.
    """
    u = uniform_block(key, start_counter, 2 * count)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass
class SeededRng:
    """Single-owner view of a counter stream: key plus advancing counter."""

    key: int
    counter: int = 0
    _spawned: int = field(default=0, repr=False)

    @classmethod
    def from_seed(cls, seed: int) -> "SeededRng":
        return cls(key=mix64(seed & MASK64))

    def uniform(self) -> float:
        v = uniform_draw(self.key, self.counter)
        self.counter += 1
        return v

    def integer(self, bound: int) -> int:
        """Uniform integer on {0, ..., bound-1}."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return int(self.uniform() * bound)

    def gauss(self, mean: float = 0.0, sd: float = 1.0) -> float:
        if sd <= 0:
            raise ValueError("sd must be positive")
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return mean + sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def spawn(self) -> "SeededRng":
        """Independent substream; derivation order is part of the stream state."""
        child = SeededRng(key=derive_key(self.key, self._spawned))
        self._spawned += 1
        return child
