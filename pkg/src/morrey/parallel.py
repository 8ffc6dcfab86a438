"""Seeded per-stream RNGs and an order-preserving thread map."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "MORREY_THREADS"
DEFAULT_STREAMS = 4


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def stream_rngs(seed: int, streams: int) -> list[np.random.Generator]:
    # Stream count is part of the config, thread count is not: results must
    # not depend on MORREY_THREADS.
    children = np.random.SeedSequence(seed).spawn(streams)
    return [np.random.default_rng(c) for c in children]


def ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map ``fn`` over ``items``, possibly concurrently; output keeps input order."""
    threads = min(thread_count(), len(items))
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
