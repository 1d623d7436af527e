"""Core infrastructure shared by the flag mirror toolkit."""

__all__ = [
    "fanout",
    "logging",
    "runtime",
]
