"""Seeded, splittable random streams.

Every random draw in the package comes from a Philox (counter-based) generator
keyed by ``(master_seed, stream key)``. Work items derive their own stream from a
fixed key, so results do not depend on how the work is scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

# stream-key tags, one per experiment family
HAAR = 1
TAILS = 2
QUE = 3
ERGODIC = 4
MISC = 99

_U64 = 2**64


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``seed`` and an integer stream key."""
    if not 0 <= int(seed) < _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Ordered map over ``items``, using a thread pool when ``workers > 1``.

    Output order always follows input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), at 53-bit resolution."""
    k = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (k + 0.5) * 2.0**-53

