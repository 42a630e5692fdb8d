"""Seeded xoshiro256** generator with Box-Muller normals.

Pure Python so the byte stream is fixed by this file alone, independent of
numpy's generator versions.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Order-free 64-bit seed for a tuple of integers, e.g. (master, n, rep)."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(int(part).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


class Xoshiro256:
    def __init__(self, seed: int):
        sm = int(seed) & MASK64
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform on the half-open interval (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * (1.0 / (1 << 53))

    def standard_normal(self, size: int) -> np.ndarray:
        out = np.empty(size)
        i = 0
        while i < size:
            r = math.sqrt(-2.0 * math.log(self.uniform()))
            theta = 2.0 * math.pi * self.uniform()
            out[i] = r * math.cos(theta)
            if i + 1 < size:
                out[i + 1] = r * math.sin(theta)
            i += 2
        return out
