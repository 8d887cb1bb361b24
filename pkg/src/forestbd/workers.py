"""Deterministic worker-pool helpers.

Parallelism must never change a result: items are evaluated in fixed-size
blocks and combined strictly in input order, so any thread count produces
the same value as a sequential run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from .errors import ContractError

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "FB_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else the FB_THREADS environment variable, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ContractError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if threads < 1:
        raise ContractError(f"thread count must be >= 1, got {threads}")
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [fn(x) for x in work]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, work))


def first_hit(
    fn: Callable[[T], Optional[R]], items: Iterable[T], threads: int = 1
) -> Optional[R]:
    """First non-None fn(item) in input order, evaluating blockwise."""
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        for item in work:
            result = fn(item)
            if result is not None:
                return result
        return None
    block = threads * 8
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(work), block):
            for result in pool.map(fn, work[start : start + block]):
                if result is not None:
                    return result
    return None


def all_true(fn: Callable[[T], bool], items: Iterable[T], threads: int = 1) -> bool:
    """Whether fn holds everywhere, evaluating blockwise with early exit."""
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return all(fn(item) for item in work)
    block = threads * 8
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(work), block):
            if not all(pool.map(fn, work[start : start + block])):
                return False
    return True
