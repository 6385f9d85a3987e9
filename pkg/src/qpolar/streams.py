"""Splittable seeded random streams.

A master seed plus a spawn key (a tuple of integers) identifies every
random stream used by construction and simulation, so results depend only
on the seed, the purpose of the stream and the trial index.
"""

import zlib
from dataclasses import dataclass

import numpy as np


def _tag_value(tag: int | str) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode('utf-8'))
    if tag < 0:
        raise ValueError(f"Stream tags must be non-negative, got {tag}")
    return int(tag)


@dataclass(frozen=True)
class SeedStream:
    """A node in the tree of random streams derived from one master seed."""
    seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError(f"Seed must be non-negative, got {self.seed}")

    def child(self, tag: int | str) -> 'SeedStream':
        """Derive an independent sub-stream."""
        return SeedStream(self.seed, (*self.key, _tag_value(tag)))

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.key))

    def trial(self, index: int) -> np.random.Generator:
        """Generator for one Monte Carlo trial."""
        return self.child(index).generator()
