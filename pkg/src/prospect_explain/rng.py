"""Deterministic pseudo-random generator used across the workbench.

A single generator family is pinned so that every stochastic step
(synthetic data, train/test shuffling, network initialization,
neighborhood sampling) is reproducible from an explicit 64-bit seed:
xoshiro256++ state, filled from the seed by splitmix64, with normal
deviates produced by the Box-Muller transform.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_INV_2_53 = 2.0 ** -53
_TWO_PI = 2.0 * math.pi


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Xoshiro256PP:
    """xoshiro256++ generator seeded via splitmix64.

    Scalar draws (`uniform`, `normal`, `randint_below`) and the block
    draws (`uniforms`, `normals`) consume the same underlying 64-bit
    stream in the same order; block normal generation is vectorized and
    may differ from repeated scalar calls in the final ulp only.
    """

    __slots__ = ("_s0", "_s1", "_s2", "_s3", "_spare")

    def __init__(self, seed: int):
        state = int(seed) & _MASK64
        state, self._s0 = _splitmix64(state)
        state, self._s1 = _splitmix64(state)
        state, self._s2 = _splitmix64(state)
        state, self._s3 = _splitmix64(state)
        self._spare: float | None = None

    @property
    def state(self) -> tuple[int, int, int, int]:
        return (self._s0, self._s1, self._s2, self._s3)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        x = (s0 + s3) & _MASK64
        result = (((x << 23) | (x >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self._s0, self._s1, self._s2 = s0, s1, s2
        self._s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        return result

    def u64_block(self, n: int) -> np.ndarray:
        """n raw 64-bit draws as a uint64 array (tight scalar loop)."""
        out = np.empty(n, dtype=np.uint64)
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        for i in range(n):
            x = (s0 + s3) & _MASK64
            out[i] = (((x << 23) | (x >> 41)) + s0) & _MASK64
            t = (s1 << 17) & _MASK64
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return out

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniforms(self, n: int) -> np.ndarray:
        return (self.u64_block(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def normal(self) -> float:
        """Standard normal deviate via Box-Muller (pairs are cached)."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
            return z
        # 1 - U in (0, 1] keeps log() defined without rejection.
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(_TWO_PI * u2)
        return r * math.cos(_TWO_PI * u2)

    def normals(self, n: int) -> np.ndarray:
        """n standard normal deviates, Box-Muller applied blockwise."""
        out = np.empty(n, dtype=np.float64)
        start = 0
        if self._spare is not None and n > 0:
            out[0] = self._spare
            self._spare = None
            start = 1
        pairs = (n - start + 1) // 2
        if pairs > 0:
            u = self.uniforms(2 * pairs)
            u1 = 1.0 - u[0::2]
            u2 = u[1::2]
            r = np.sqrt(-2.0 * np.log(u1))
            angle = _TWO_PI * u2
            z = np.empty(2 * pairs, dtype=np.float64)
            z[0::2] = r * np.cos(angle)
            z[1::2] = r * np.sin(angle)
            take = n - start
            out[start:] = z[:take]
            if take < 2 * pairs:
                self._spare = float(z[take])
        return out

    def randint_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) without modulo bias."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            raw = self.next_u64()
            if raw < limit:
                return raw % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint_below(i + 1)
            items[i], items[j] = items[j], items[i]
