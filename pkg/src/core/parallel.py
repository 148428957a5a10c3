"""
Ordered parallel map over a thread pool.

Results always come back in input order, so downstream reductions see the
same sequence whatever the thread count.
"""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .config import Config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], threads: int | None = None
) -> list[R]:
    """Apply `fn` to every item, possibly in parallel, preserving order."""
    items = list(items)
    workers = min(Config.resolve_threads(threads), max(len(items), 1))
    if workers <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        # executor.map yields in submission order and re-raises the first error
        return list(executor.map(fn, items))
