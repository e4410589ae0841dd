"""Exact big-integer helpers (gmpy2-backed for speed, plain int API)."""

from __future__ import annotations

import math

import gmpy2

__all__ = ["comb", "ceil_log2", "int_log2"]


def comb(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); 0 outside the triangle."""
    if k < 0 or k > n:
        return 0
    return int(gmpy2.comb(n, k))


def ceil_log2(x: int) -> int:
    """Smallest b with 2^b >= x, for integer x >= 1."""
    if x < 1:
        raise ValueError(f"ceil_log2 needs x >= 1, got {x}")
    return (x - 1).bit_length()


def int_log2(x: int) -> float:
    """log2 of a positive integer, safe for values far beyond float range."""
    if x < 1:
        raise ValueError(f"int_log2 needs x >= 1, got {x}")
    e = x.bit_length() - 53
    if e <= 0:
        return math.log2(x)
    return math.log2(x >> e) + e
