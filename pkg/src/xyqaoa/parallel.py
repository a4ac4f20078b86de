"""Tiny worker-pool helper shared by the optimizer and the grid runner.

The pool size is capped by the XYQAOA_THREADS environment variable; results
always come back in submission order so callers stay deterministic regardless
of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

__all__ = ["resolve_workers", "ordered_map"]


def resolve_workers(workers: int | None = None) -> int:
    """Effective worker count: explicit argument, else env cap, else one CPU each."""
    cap = os.environ.get("XYQAOA_THREADS")
    if workers is None:
        workers = int(cap) if cap else (os.cpu_count() or 1)
    elif cap:
        workers = min(workers, int(cap))
    return max(1, workers)


def ordered_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Map ``fn`` over ``items``, in parallel when allowed, preserving order."""
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(items) // (workers * 4))
        return list(pool.map(fn, items, chunksize=chunk))
