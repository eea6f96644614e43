"""Deterministic RNG streams.

Every randomized operation takes an explicit ``random.Random`` stream.
Streams are created from 64-bit seeds and may be split into independent
child streams; the same seed and call sequence always replays bit-exactly.
"""

from __future__ import annotations

import random

MASK64 = (1 << 64) - 1
_SPLIT_MIX = 0x9E3779B97F4A7C15


def stream(seed: int) -> random.Random:
    """Return a fresh deterministic stream for a 64-bit seed."""
    return random.Random(seed & MASK64)


def split(seed: int, index: int) -> int:
    """Derive the seed of the ``index``-th child stream of ``seed``."""
    x = (seed + (index + 1) * _SPLIT_MIX) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def substream(seed: int, index: int) -> random.Random:
    """Child stream ``index`` of master ``seed`` (per-trial / per-party)."""
    return stream(split(seed, index))
