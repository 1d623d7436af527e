"""Logging helpers for the flag mirror toolkit.

All subsystems log through :func:`get_logger` so that the command line and
the test-suite see one structured ``key=value`` format.  Nothing in the
library installs handlers on import; the CLI calls :func:`configure_logging`
once during start-up.
"""

from __future__ import annotations

import logging
import os
import sys
import threading
from typing import Iterable

__all__ = ["configure_logging", "get_logger", "warn_once", "reset_warn_once"]

_VERBOSE_ENVS = ("FLAGMIRROR_VERBOSE", "LOG_VERBOSE")
_TRUTHY = {"1", "true", "TRUE", "yes", "on"}

_warned: set[tuple[str, str]] = set()
_warned_lock = threading.Lock()


class _StructuredFormatter(logging.Formatter):
    """Formatter that renders log records in a key=value style."""

    default_time_format = "%Y-%m-%dT%H:%M:%S"
    default_msec_format = "%s.%03d"

    def format(self, record: logging.LogRecord) -> str:  # pragma: no cover - wrapper
        record.message = record.getMessage()
        parts = [
            f"level={record.levelname}",
            f"logger={record.name}",
        ]
        if record.message:
            parts.append(f"msg={record.message}")
        if record.exc_info:
            parts.append(self.formatException(record.exc_info))
        return " ".join(parts)


def _resolve_level(default_level: int, verbose: bool) -> int:
    if verbose:
        return logging.DEBUG
    for env in _VERBOSE_ENVS:
        if os.getenv(env, "").strip() in _TRUTHY:
            return logging.DEBUG
    return default_level


def configure_logging(
    *,
    default_level: int = logging.INFO,
    structured: bool = True,
    verbose: bool = False,
    extra_loggers: Iterable[str] | None = None,
) -> None:
    """Configure the root logging handler if none is installed.

    Parameters
    ----------
    default_level:
        Logging level used when neither ``verbose`` nor one of the verbose
        environment variables (``FLAGMIRROR_VERBOSE``, ``LOG_VERBOSE``) is set.
    structured:
        When :class:`True`, attach a key=value formatter for easy parsing.
    verbose:
        Force DEBUG output (the CLI ``--verbose`` flag).
    extra_loggers:
        Optional logger names that should inherit the configured level, for
        example ``"sympy"`` when debugging conversions.
    """

    level = _resolve_level(default_level, verbose)
    root = logging.getLogger()
    if root.handlers:
        root.setLevel(level)
    else:
        # reports own stdout
        handler = logging.StreamHandler(sys.stderr)
        plain = logging.Formatter("%(levelname)s:%(name)s:%(message)s")
        handler.setFormatter(_StructuredFormatter() if structured else plain)
        root.addHandler(handler)
        root.setLevel(level)

    for name in extra_loggers or ():
        logging.getLogger(name).setLevel(level)

    logging.captureWarnings(True)


def get_logger(name: str) -> logging.Logger:
    """Return a logger using the shared configuration."""

    return logging.getLogger(name)


def warn_once(logger: logging.Logger, key: str, message: str, *args: object) -> bool:
    """Emit ``message`` at WARNING level only the first time ``key`` is seen.

    Returns ``True`` when the warning was emitted.
    """

    token = (logger.name, key)
    with _warned_lock:
        if token in _warned:
            return False
        _warned.add(token)
    logger.warning(message, *args)
    return True


def reset_warn_once() -> None:
    """Forget all keys recorded by :func:`warn_once` (used by tests)."""

    with _warned_lock:
        _warned.clear()
