"""Helpers for finite binary strings, ordered by the initial-segment relation."""

from __future__ import annotations

from typing import Iterable


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def strict_prefix(a: str, b: str) -> bool:
    return len(a) < len(b) and b.startswith(a)


def comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def lcp(a: str, b: str) -> str:
    """Longest common prefix (the infimum under the prefix order)."""
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return a[:i]


def shortlex_key(a: str) -> tuple[int, str]:
    return (len(a), a)


def prefixes(a: str) -> list[str]:
    """All initial segments of ``a``, shortest first, including ``a``."""
    return [a[:i] for i in range(len(a) + 1)]


def check_bits(a: str) -> str:
    if any(c not in "01" for c in a):
        raise ValueError(f"not a binary string: {a!r}")
    return a


def all_strings(max_len: int) -> Iterable[str]:
    """Every string of length <= max_len in shortlex order."""
    level = [""]
    for _ in range(max_len + 1):
        yield from level
        level = [s + b for s in level for b in "01"]
