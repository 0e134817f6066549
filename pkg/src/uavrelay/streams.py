"""Counter-based random streams.

Every block of draws is addressed by ``(seed, *key, chunk_index)`` and fed
to a Philox generator, so a given sample always comes from the same place in
the same stream no matter how the work is split across threads.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from .errors import DomainError

CHUNK_SIZE = 1 << 15

T = TypeVar("T")


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def chunk_bounds(n: int, chunk_size: int = CHUNK_SIZE) -> List[Tuple[int, int, int]]:
    """``(chunk_index, start, stop)`` triples covering ``range(n)``."""
    return [(i, s, min(s + chunk_size, n)) for i, s in enumerate(range(0, n, chunk_size))]


def resolve_threads(threads: int) -> int:
    """Worker count; ``0`` or ``None`` means one per CPU."""
    if threads is not None and threads < 0:
        raise DomainError(f"thread count must be >= 0, got {threads}")
    if not threads:
        return os.cpu_count() or 1
    return int(threads)


def ordered_map(fn: Callable[..., T], items: Sequence, threads: int = 1) -> List[T]:
    """``[fn(x) for x in items]``, optionally on a thread pool; order preserved."""
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
