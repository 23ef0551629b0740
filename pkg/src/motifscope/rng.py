"""SplitMix64, the toolkit's only random number generator.

SplitMix64 (Steele, Lea & Flood 2014) keeps a 64-bit counter ``s``. Each
call does ``s += 0x9E3779B97F4A7C15`` and returns the mixed value::

    z = s
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

all modulo 2**64. Uniform integers in ``[0, m)`` are taken as ``z % m``.
Per-sample seeds are derived in counter mode: sample ``i`` of a run seeded
with ``s`` uses the ``(i+1)``-th output of SplitMix64 started at ``s``.

Reference outputs for seed 0::

    0xe220a8397b1dcdaf 0x6e789e6aa1b965f4 0x06c45d188009454f 0xf88bb8a8724c81ec
"""
from __future__ import annotations

NAME = "splitmix64"
MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def below(self, m: int) -> int:
        return self.next() % m


def derive_seed(seed: int, index: int) -> int:
    """Seed for sample ``index``: output ``index + 1`` of SplitMix64(seed)."""
    return mix64((seed + (index + 1) * GAMMA) & MASK64)


def reference_outputs(seed: int = 0, n: int = 4) -> list[int]:
    r = SplitMix64(seed)
    return [r.next() for _ in range(n)]
