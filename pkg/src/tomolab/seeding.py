"""Deterministic derivation of independent random streams.

A per-trial stream is ``numpy.random.Generator(PCG64(splitmix64(seed ^ index)))``
where ``splitmix64`` is the standard SplitMix64 finalizer::

    z = (x + 0x9E3779B97F4A7C15)            mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z =  z ^ (z >> 31)

Streams for distinct (seed, index) pairs are unrelated, and the mapping is
stable across platforms, so other implementations can reproduce it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    return splitmix64((int(seed) ^ int(index)) & MASK64)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for trial ``index`` of an experiment seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, index)))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
