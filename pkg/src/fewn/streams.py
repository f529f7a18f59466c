"""Replication substreams for Monte Carlo runs.

Replication ``r`` of a run seeded with ``seed`` belongs to block
``r // BLOCK_SIZE``.  Each block draws from its own PCG64 generator seeded by
``SeedSequence(seed, spawn_key=(block,))``, so the numbers a replication sees
depend only on ``(seed, r)``.  Blocks may therefore be evaluated in any order
or on any number of workers, and tallies merged by integer addition.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .errors import DomainError

BLOCK_SIZE = 1000

T = TypeVar("T")


def check_seed(seed) -> int:
    if seed is None or isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def block_sizes(reps: int) -> list[int]:
    full, rest = divmod(reps, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def map_blocks(
    fn: Callable[[np.random.Generator, int], T],
    reps: int,
    seed: int,
    workers: int = 1,
) -> list[T]:
    """Apply ``fn(generator, size)`` to every block; results in block order."""
    seed = check_seed(seed)
    sizes = block_sizes(reps)

    def run(block: int) -> T:
        return fn(block_generator(seed, block), sizes[block])

    if workers <= 1 or len(sizes) <= 1:
        return [run(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))
