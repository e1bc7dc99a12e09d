"""Deterministic random number streams.

All stochastic stages draw from PCG32 streams derived from a single master
seed through a keyed splitmix64 hash.  Results are therefore a pure function
of (master seed, stream key) and identical across platforms, process counts,
and scheduling order.  The render kernels re-implement the same PCG32 step
in compiled code; ``tests/test_rng.py`` cross-checks the two.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_PCG_MULT = 6364136223846793005
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _fold(h: int, data: bytes) -> int:
    # FNV-1a over the bytes, then a splitmix64 finalize against h.
    acc = 0xCBF29CE484222325
    for b in data:
        acc = ((acc ^ b) * 0x100000001B3) & MASK64
    _, out = splitmix64((h ^ acc) & MASK64)
    return out


def derive_key(*parts: int | str) -> int:
    """Hash a tuple of ints/strings to a 64-bit stream key (order-sensitive)."""
    h = _GOLDEN
    for part in parts:
        if isinstance(part, str):
            data = b"s" + part.encode("utf-8")
        else:
            data = b"i" + int(part).to_bytes(16, "little", signed=True)
        h = _fold(h, data)
    return h


class Pcg32:
    """Minimal PCG32 (XSH-RR variant): 64-bit state, 32-bit output."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = 0):
        self.state = 0
        self.inc = ((stream << 1) | 1) & MASK64
        self.next_u32()
        self.state = (self.state + (seed & MASK64)) & MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & 0xFFFFFFFF

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) with 53 random mantissa bits."""
        hi32 = self.next_u32()
        lo32 = self.next_u32()
        u = (((hi32 << 32) | lo32) >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def randint(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        threshold = (1 << 32) % n
        while True:
            r = self.next_u32()
            if r >= threshold:
                return r % n

    def choice(self, seq):
        return seq[self.randint(len(seq))]


class SeedTree:
    """Derives independent child streams from one master seed by key.

    Keys are tuples like ("arrange", i) or ("render", i, j, tier); distinct
    keys give statistically independent PCG32 streams, so any unit of work
    can be reproduced in isolation.
    """

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def seed(self, *key: int | str) -> int:
        return derive_key(self.master_seed, *key)

    def stream(self, *key: int | str) -> Pcg32:
        s = self.seed(*key)
        return Pcg32(seed=s, stream=derive_key(s, "stream"))
