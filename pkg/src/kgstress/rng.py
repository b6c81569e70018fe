"""SplitMix64 generator and a Fisher-Yates shuffle built on it.

Python's ``random`` is stable across platforms too, but the seeded Head
sample has to be reproducible from a short written description, so the
generator is spelled out here instead of relying on interpreter internals.
"""
from __future__ import annotations

from typing import Iterator, MutableSequence, TypeVar

T = TypeVar("T")

_MASK = (1 << 64) - 1


def splitmix64(seed: int) -> Iterator[int]:
    state = seed & _MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


def shuffle(items: MutableSequence[T], seed: int) -> MutableSequence[T]:
    """In-place Fisher-Yates shuffle; index draws use ``next() % (i + 1)``."""
    gen = splitmix64(seed)
    for i in range(len(items) - 1, 0, -1):
        j = next(gen) % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


def permutation(n: int, seed: int) -> list[int]:
    return list(shuffle(list(range(n)), seed))
