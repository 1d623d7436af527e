"""Environment helpers for parallelism, seeds and numeric tolerances."""

from __future__ import annotations

import os

_THREADS_ENV = "FLAGMIRROR_THREADS"
_SEED_ENV = "FLAGMIRROR_SEED"
_TOL_ENV = "FLAGMIRROR_TOL"
_MAX_DEFAULT_THREADS = 8


def default_thread_count() -> int:
    """Return the worker count used when nothing is configured."""

    return max(1, min(_MAX_DEFAULT_THREADS, os.cpu_count() or 1))


def thread_cap(default: int | None = None) -> int:
    """Return the worker cap honouring :envvar:`FLAGMIRROR_THREADS`.

    Invalid inputs fall back to ``default`` (or :func:`default_thread_count`).
    """

    fallback = default if default is not None else default_thread_count()
    raw = os.environ.get(_THREADS_ENV)
    if not raw:
        return max(1, fallback)
    try:
        value = int(raw)
    except ValueError:
        return max(1, fallback)
    return max(1, value)


def default_seed(default: int = 0) -> int:
    """Return the seed used when the CLI ``--seed`` flag is absent."""

    raw = os.environ.get(_SEED_ENV)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def numeric_tolerance(default: float = 1e-8) -> float:
    """Return the critical-point tolerance, overridable by :envvar:`FLAGMIRROR_TOL`."""

    raw = os.environ.get(_TOL_ENV)
    if not raw:
        return default
    try:
        value = float(raw)
    except ValueError:
        return default
    if value <= 0.0:
        return default
    return value


__all__ = [
    "default_seed",
    "default_thread_count",
    "numeric_tolerance",
    "thread_cap",
]
