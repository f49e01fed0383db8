"""
Thread-pool helpers for replicate and grid-point work.

Results always come back in input order, so reductions do not depend on
the number of workers.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``func`` to every item, optionally on a thread pool.

    Args:
        func: Function of one item.
        items: Inputs.
        workers: Pool size; ``<= 1`` runs inline.

    Returns:
        ``[func(item) for item in items]``, in input order. The first
        exception raised by ``func`` propagates.
    """
    work = list(items)
    if workers <= 1 or len(work) <= 1:
        return [func(item) for item in work]
    logger.debug(f"Running {len(work)} tasks on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, work))
