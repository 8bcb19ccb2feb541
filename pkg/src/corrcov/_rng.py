"""Deterministic seed derivation and generator construction.

All randomness in the package flows through counter-based Philox generators
whose 128-bit keys are derived from 64-bit seeds by a splitmix64 chain.
Derived seeds depend only on the component values, never on call order or
scheduling, so experiments reproduce bit-identically across worker counts.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(*parts: int | str) -> int:
    """Mix integers and strings into a single 64-bit seed.

    Strings are folded in byte by byte; integers (any sign, any size) are
    reduced mod 2^64 first. The chain is order-sensitive: derive_seed(a, b)
    and derive_seed(b, a) differ.
    """
    h = _splitmix64(len(parts) & _MASK64)
    for part in parts:
        if isinstance(part, str):
            for b in part.encode("utf-8"):
                h = _splitmix64(h ^ b)
        else:
            h = _splitmix64(h ^ (int(part) & _MASK64))
    return h


def generator_from_seed(seed: int) -> np.random.Generator:
    """Philox generator keyed by two splitmix64 words derived from seed."""
    s = int(seed) & _MASK64
    key = np.array([_splitmix64(s), _splitmix64(_splitmix64(s))], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
