"""Minimal starter for the flag mirror command line."""

from __future__ import annotations

import sys

from flagmirror.cli import main

if __name__ == "__main__":  # pragma: no cover - convenience wrapper
    sys.exit(main())
