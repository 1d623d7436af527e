"""Fan independent jobs out to a bounded thread pool."""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Generic, Iterable, List, Optional, Sequence, TypeVar

from .logging import get_logger
from .runtime import thread_cap

__all__ = ["FanOutStats", "fan_out"]

T = TypeVar("T")
R = TypeVar("R")


@dataclass(slots=True)
class FanOutStats(Generic[R]):
    """Results of a fan-out, in the order of the submitted items."""

    results: List[R] = field(default_factory=list)
    workers: int = 1
    elapsed_s: float = 0.0


def fan_out(
    func: Callable[[int, T], R],
    items: Iterable[T],
    *,
    max_workers: int | None = None,
    label: str = "jobs",
    logger: Optional[logging.Logger] = None,
) -> FanOutStats[R]:
    """Run ``func(index, item)`` for every item and collect the results.

    Each job receives its position so that seeding is per item rather than
    per schedule; the returned list is always in item order regardless of
    completion order.  ``max_workers`` defaults to :func:`core.runtime.thread_cap`.
    """

    log = logger or get_logger("core.fanout")
    jobs: Sequence[T] = list(items)
    workers = max(1, min(max_workers or thread_cap(), len(jobs) or 1))
    start = time.perf_counter()
    results: List[Optional[R]] = [None] * len(jobs)

    if workers == 1:
        for index, item in enumerate(jobs):
            results[index] = func(index, item)
    else:
        lock = threading.Lock()

        def _run(index: int, item: T) -> None:
            value = func(index, item)
            with lock:
                results[index] = value

        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="flagmirror") as pool:
            futures = [pool.submit(_run, index, item) for index, item in enumerate(jobs)]
            for future in futures:
                future.result()

    elapsed = time.perf_counter() - start
    log.debug("fanout label=%s jobs=%d workers=%d elapsed_s=%.3f", label, len(jobs), workers, elapsed)
    return FanOutStats(results=list(results), workers=workers, elapsed_s=elapsed)  # type: ignore[arg-type]
