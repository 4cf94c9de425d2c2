"""Portable seeded generator for reproducible random instances.

Random roots must be identical on every platform and Python version, so the
CLI and the tests never use `random` or numpy's default bit generator for
instances. The generator is xorshift64* (Marsaglia shift register followed by
a multiplicative scramble):

    x ^= x >> 12; x ^= x << 25; x ^= x >> 27        (mod 2^64)
    output = x * 0x2545F4914F6CDD1D                  (mod 2^64)

The seed is expanded with one splitmix64 step so that seed 0 and small seeds
give a well-mixed non-zero state. Floats take the top 53 bits of an output.
"""

from __future__ import annotations

import math
from typing import List

MASK64 = (1 << 64) - 1
XORSHIFT_MULTIPLIER = 0x2545F4914F6CDD1D

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    z = (x + _SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    def __init__(self, seed: int) -> None:
        if seed < 0:
            raise ValueError("seed must be >= 0")
        state = _splitmix64(int(seed) & MASK64)
        self._state = state or _SPLITMIX_GAMMA

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * XORSHIFT_MULTIPLIER) & MASK64

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] (inclusive). Modulo reduction; bias is below 2^-50 for small ranges."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)


def random_circle_angles(rng: XorShift64Star, n: int) -> List[float]:
    """n angles uniform on [0, 2*pi) for roots on the unit circle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [rng.uniform(0.0, 2.0 * math.pi) for _ in range(n)]
