"""Deterministic pseudo-random numbers for dataset synthesis.

The generator is pinned by its recurrence (xorshift64* with a splitmix64
seed scrambler) so a seed reproduces bit-identical datasets on any
platform and any library version. Normals come from Box-Muller.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_INV53 = 2.0**-53


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Rng:
    """xorshift64* stream seeded through splitmix64.

    State update: x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
    output: x * 2685821657736338717 (mod 2^64).
    """

    def __init__(self, seed: int):
        state = _splitmix64(int(seed) & _MASK64)
        # xorshift state must be nonzero
        self._state = state if state != 0 else 0x9E3779B97F4A7C15
        self._spare_normal = None

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self) -> float:
        """Uniform draw in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def normal(self) -> float:
        """Standard normal draw (Box-Muller, pairs cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        # u1 in (0, 1] so the log is finite
        u1 = ((self.next_u64() >> 11) + 1) * _INV53
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._spare_normal = radius * math.sin(angle)
        return radius * math.cos(angle)

    def uniforms(self, k: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(k)])

    def normals(self, k: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(k)])
