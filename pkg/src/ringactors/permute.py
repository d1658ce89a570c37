"""Seeded random permutation by repeatedly popping a random element.

The generator is xorshift64* (Vigna, 2016). With 64-bit wrap-around
arithmetic, one step is::

    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    out = x * 0x2545F4914F6CDD1D

The seed is passed through one SplitMix64 round so that small or zero seeds
still give a non-zero, well-mixed starting state.
"""

from __future__ import annotations

import secrets
from typing import Sequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class Rng:
    """Deterministic xorshift64* generator."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = splitmix64(seed & MASK64) or 0x9E3779B97F4A7C15

    @classmethod
    def from_entropy(cls) -> Rng:
        return cls(secrets.randbits(64))

    def copy(self) -> Rng:
        other = Rng.__new__(Rng)
        other.state = self.state
        return other

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def rand_range(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``, inclusive.

        Uses rejection sampling, so the result carries no modulo bias.
        """
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def __repr__(self) -> str:
        return f"Rng(state={self.state:#018x})"


def permute(items: Sequence[T], rng: Rng) -> tuple[list[T], Rng]:
    """Randomly reorder ``items``.

    Each round pops a uniformly chosen element from the remaining pool. Every
    popped element goes to the front of the output, so the result lists the
    elements in reverse pop order. Returns the permutation and ``rng``, which
    has been advanced once per element.
    """
    pool = list(items)
    popped = []
    for _ in range(len(pool)):
        assert pool, "pop empty list"
        popped.append(pool.pop(rng.rand_range(0, len(pool) - 1)))
    popped.reverse()
    return popped, rng

