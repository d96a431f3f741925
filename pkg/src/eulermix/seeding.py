"""Counter-based random streams and block-parallel Monte Carlo.

Replicas are grouped into fixed-size blocks; block ``b`` of a run seeded with
``master`` always draws from the stream ``(master, b)``. Results therefore do
not depend on how many workers process the blocks or in which order.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any, TypeVar

import numpy as np

T = TypeVar("T")

DEFAULT_BLOCK = 1000

_workers = 1


def set_default_workers(workers: int) -> None:
    """Process count used by :func:`map_blocks` when none is given."""
    global _workers
    _workers = max(1, int(workers))


def stream(master: int, index: int) -> np.random.Generator:
    """Independent generator for sub-stream ``index`` of seed ``master``."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def blocks(replicas: int, block_size: int = DEFAULT_BLOCK) -> list[tuple[int, int]]:
    """``(block_index, size)`` pairs covering ``replicas``."""
    if replicas < 1:
        raise ValueError("need at least one replica")
    out = []
    for b, start in enumerate(range(0, replicas, block_size)):
        out.append((b, min(block_size, replicas - start)))
    return out


def map_blocks(
    fn: Callable[..., T],
    replicas: int,
    seed: int,
    args: Sequence[Any] = (),
    workers: int | None = None,
    block_size: int = DEFAULT_BLOCK,
) -> list[T]:
    """Call ``fn(*args, rng, size)`` once per block and return results in block order."""
    workers = _workers if workers is None else max(1, workers)
    jobs = blocks(replicas, block_size)
    if workers == 1 or len(jobs) == 1:
        return [fn(*args, stream(seed, b), size) for b, size in jobs]
    workers = min(workers, len(jobs), os.cpu_count() or 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args, stream(seed, b), size) for b, size in jobs]
        return [f.result() for f in futures]
