"""Shared numeric helpers for the test suite."""


def rel(a, b) -> float:
    """Relative deviation with a unit floor, |a - b| / max(1, |a|, |b|)."""
    return abs(a - b) / max(1.0, abs(a), abs(b))
