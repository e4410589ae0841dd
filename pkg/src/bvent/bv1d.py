"""One-dimensional step functions: Jordan decomposition, monotone staircase
nets, and the two-part code for bounded-variation functions.

The code for a 1-D function f with sup |f| <= M and variation at most V splits
f into two nondecreasing parts via its running variation, quantizes each part
on a staircase net, and stores each staircase as its rank in the colex
enumeration of nondecreasing level sequences.  Decoding the pair reproduces f
to within a prescribed L1 accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from ._bigint import comb
from .errors import ClassViolationError, DomainMismatchError, ParseError, RangeError

__all__ = [
    "StepFunction1D",
    "MonotoneNetParams",
    "MonotoneCodeword",
    "BVCodeword1D",
    "step_total_variation",
    "step_l1",
    "resample_step",
    "running_variation",
    "jordan_decompose",
    "monotone_net_params",
    "quantize_monotone",
    "dequantize_monotone",
    "monotone_net_size",
    "codeword_rank",
    "codeword_unrank",
    "bv_net_params",
    "encode_bv_1d",
    "decode_bv_1d",
    "entropy_bound_1d",
    "random_step",
]


@dataclass(frozen=True, eq=False)
class StepFunction1D:
    """Step function on [0, length) with k equal cells, value per cell."""

    length: float
    k: int
    values: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive and finite, got {self.length!r}")
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.k,):
            raise ValueError(f"values must have length k = {self.k}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def step_total_variation(f: StepFunction1D) -> float:
    if f.k == 1:
        return 0.0
    return math.fsum(np.abs(np.diff(f.values)))


def _merged_intervals(k_a: int, k_b: int):
    """Elementary intervals of the merged uniform partitions, integer units.

    One unit is 1/(k_a*k_b) of the domain; returns (lengths, idx_a, idx_b).
    """
    bounds = np.union1d(
        np.arange(k_a + 1, dtype=np.int64) * k_b,
        np.arange(k_b + 1, dtype=np.int64) * k_a,
    )
    lens = np.diff(bounds)
    starts = bounds[:-1]
    return lens, starts // k_b, starts // k_a


def step_l1(f: StepFunction1D, g: StepFunction1D) -> float:
    """Exact integral of |f - g| via the merged partition (no lcm blow-up)."""
    if f.length != g.length:
        raise DomainMismatchError(f"length mismatch: {f.length} vs {g.length}")
    lens, idx_f, idx_g = _merged_intervals(f.k, g.k)
    diff = np.abs(f.values[idx_f] - g.values[idx_g])
    return math.fsum(diff * lens) * (f.length / (f.k * g.k))


def resample_step(f: StepFunction1D, k_new: int) -> StepFunction1D:
    """Exact cell means of f on the k_new-cell partition of the same domain.

    This is an L1 contraction: resampling never increases the distance to any
    function that is itself constant on the target cells.
    """
    if k_new == f.k:
        return f
    lens, idx_new, idx_old = _merged_intervals(k_new, f.k)
    sums = np.bincount(idx_new, weights=f.values[idx_old] * lens, minlength=k_new)
    return StepFunction1D(f.length, k_new, sums / f.k)


def running_variation(f: StepFunction1D) -> StepFunction1D:
    """V_f: cell i holds the accumulated |jump| sum strictly before cell i."""
    v = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(f.values)))))
    return StepFunction1D(f.length, f.k, v)


def jordan_decompose(f: StepFunction1D, M: float):
    """Split f = f_plus - f_minus into nondecreasing parts, shifted by M/2.

    f_minus = (V_f - f)/2 + M/2 and f_plus = (V_f + f)/2 + M/2.  For
    sup |f| <= M and TV(f) <= V both parts take values in [0, (V + 2M)/2].
    The identity f_plus - f_minus = f is exact whenever the float arithmetic
    incurs no rounding (e.g. dyadic inputs), and within a few ulp otherwise.
    """
    s = float(np.max(np.abs(f.values)))
    if s > M + 1e-9 * max(1.0, M):
        raise ClassViolationError(f"sup |f| = {s} exceeds the bound M = {M}")
    vf = running_variation(f).values
    base = vf + M
    f_plus = StepFunction1D(f.length, f.k, (base + f.values) * 0.5)
    f_minus = StepFunction1D(f.length, f.k, (base - f.values) * 0.5)
    return f_plus, f_minus


@dataclass(frozen=True)
class MonotoneNetParams:
    """Staircase net for nondecreasing functions [0,length] -> [0,bound].

    k domain cells and m value levels with k = m = ceil(4*length*bound/eps),
    which makes the quantization error at most eps/2 in L1 (see
    quantize_monotone); m = 0 only in the degenerate bound = 0 case.
    """

    length: float
    bound: float
    eps: float
    k: int
    m: int

    def __post_init__(self):
        if self.k < 1 or self.m < 0:
            raise ValueError("net needs k >= 1 and m >= 0")
        if self.m == 0 and self.bound != 0.0:
            raise ValueError("m = 0 is only allowed for bound = 0")


def monotone_net_params(length: float, bound: float, eps: float) -> MonotoneNetParams:
    if not (math.isfinite(length) and length > 0):
        raise RangeError(f"length must be positive, got {length!r}")
    if not (math.isfinite(eps) and eps > 0):
        raise RangeError(f"eps must be positive, got {eps!r}")
    if not (math.isfinite(bound) and bound >= 0):
        raise RangeError(f"bound must be nonnegative, got {bound!r}")
    if bound == 0.0:
        return MonotoneNetParams(length, 0.0, eps, 1, 0)
    k = max(1, math.ceil(4.0 * length * bound / eps))
    return MonotoneNetParams(length, bound, eps, k, k)


@dataclass(frozen=True, eq=False)
class MonotoneCodeword:
    """Nondecreasing integer levels, one per net cell, each in [0, m]."""

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=np.int64)
        if lv.ndim != 1 or lv.size < 1:
            raise ValueError("levels must be a nonempty 1-D integer array")
        if np.any(np.diff(lv) < 0) or lv[0] < 0:
            raise ValueError("levels must be nondecreasing and nonnegative")
        lv = lv.copy()
        lv.setflags(write=False)
        object.__setattr__(self, "levels", lv)


def _check_codeword(c: MonotoneCodeword, p: MonotoneNetParams) -> None:
    if c.levels.size != p.k:
        raise ValueError(f"codeword has {c.levels.size} cells, net expects {p.k}")
    if c.levels[-1] > p.m:
        raise ValueError(f"codeword level {c.levels[-1]} exceeds m = {p.m}")


def quantize_monotone(g: StepFunction1D, p: MonotoneNetParams) -> MonotoneCodeword:
    """Round the net-cell means of g onto the level grid, ties to even.

    Requires g nondecreasing with values in [0, bound].  The quantization
    error satisfies  l1(g, dequantize(quantize(g))) <= eps/2:  cell means cost
    at most length*bound/k, value rounding at most length*bound/(2m), and with
    k = m = ceil(4*length*bound/eps) the total is at most 3*eps/8.
    """
    if g.length != p.length:
        raise DomainMismatchError(f"length mismatch: {g.length} vs {p.length}")
    v = g.values
    if np.any(np.diff(v) < 0):
        raise ClassViolationError("quantize_monotone requires a nondecreasing input")
    if v[0] < 0 or v[-1] > p.bound:
        raise ClassViolationError(
            f"values [{v[0]}, {v[-1]}] leave the range [0, {p.bound}]"
        )
    if p.m == 0:
        return MonotoneCodeword(np.zeros(p.k, dtype=np.int64))
    means = resample_step(g, p.k).values
    levels = np.rint(np.clip(means * p.m / p.bound, 0, p.m)).astype(np.int64)
    # means of a nondecreasing function are nondecreasing; the running max
    # only repairs ulp-level ties
    levels = np.maximum.accumulate(levels)
    return MonotoneCodeword(levels)


def dequantize_monotone(c: MonotoneCodeword, p: MonotoneNetParams) -> StepFunction1D:
    _check_codeword(c, p)
    if p.m == 0:
        return StepFunction1D(p.length, p.k, np.zeros(p.k))
    vals = np.minimum(c.levels * (p.bound / p.m), p.bound)
    return StepFunction1D(p.length, p.k, vals)


def monotone_net_size(p: MonotoneNetParams) -> int:
    """Exact count of nondecreasing level sequences: C(k+m, m)."""
    return comb(p.k + p.m, p.m)


def _lex_rank(levels: list[int], k: int, m: int) -> "gmpy2.mpz":
    """Rank under elementwise lexicographic order, via a lattice-path walk.

    The sequence is a path of k cell steps and m level steps; at every level
    step the exact count of lex-smaller completions is accumulated.  All
    updates are exact small-factor multiplications and divisions.
    """
    r_rem = k
    u_rem = m
    pp = k + m
    w = gmpy2.comb(pp - 1, k - 1)
    rank = gmpy2.mpz(0)
    prev = 0
    for lv in levels:
        d = lv - prev
        prev = lv
        while d:
            rank += w
            w = w * u_rem // (pp - 1)
            u_rem -= 1
            pp -= 1
            d -= 1
        if r_rem > 1:
            w = w * (r_rem - 1) // (pp - 1)
        r_rem -= 1
        pp -= 1
    return rank


def _lex_unrank(rank: "gmpy2.mpz", k: int, m: int) -> np.ndarray:
    r_rem = k
    u_rem = m
    pp = k + m
    w = gmpy2.comb(pp - 1, k - 1)
    rem = rank
    levels = np.empty(k, dtype=np.int64)
    i = 0
    b = 0
    while i < k:
        if u_rem == 0:
            levels[i:] = b
            break
        if rem < w:
            levels[i] = b
            i += 1
            if r_rem > 1:
                w = w * (r_rem - 1) // (pp - 1)
            r_rem -= 1
            pp -= 1
        else:
            rem -= w
            w = w * u_rem // (pp - 1)
            u_rem -= 1
            pp -= 1
            b += 1
    if rem != 0:
        raise ParseError("inconsistent codeword rank")
    return levels


def codeword_rank(c: MonotoneCodeword, p: MonotoneNetParams) -> int:
    """Rank in the colex enumeration (last level most significant).

    Colex on a sequence equals reversed lex on the flipped reversal
    m - levels[::-1], which is again nondecreasing, so one exact path walk
    plus one binomial gives the rank.
    """
    _check_codeword(c, p)
    k, m = p.k, p.m
    if m == 0:
        return 0
    flipped = (m - c.levels[::-1]).tolist()
    total = gmpy2.comb(k + m, m)
    return int(total - 1 - _lex_rank(flipped, k, m))


def codeword_unrank(rank: int, p: MonotoneNetParams) -> MonotoneCodeword:
    """Inverse of codeword_rank; rejects ranks outside [0, C(k+m, m))."""
    k, m = p.k, p.m
    total = gmpy2.comb(k + m, m)
    if rank < 0 or rank >= total:
        raise ParseError(f"codeword rank {rank} outside the net of size C({k+m},{m})")
    if m == 0:
        return MonotoneCodeword(np.zeros(k, dtype=np.int64))
    flipped = _lex_unrank(total - 1 - gmpy2.mpz(rank), k, m)
    return MonotoneCodeword(m - flipped[::-1])


@dataclass(frozen=True, eq=False)
class BVCodeword1D:
    """Pair of staircase codewords (both built on the same net) coding f.

    plus codes the rising Jordan part, minus the falling one; the decoded
    function is dequantize(plus) - dequantize(minus).
    """

    plus: MonotoneCodeword
    minus: MonotoneCodeword


def bv_net_params(length: float, M: float, V: float, eps: float) -> MonotoneNetParams:
    """Net shared by both code parts: range bound (V + 2M)/2, accuracy eps.

    Each Jordan part of a function with sup bound M and variation at most V
    lies in [0, (V + 2M)/2]; quantizing each part to eps/2 gives a round-trip
    error of at most eps for the difference.
    """
    return monotone_net_params(length, (V + 2.0 * M) / 2.0, eps)


def encode_bv_1d(f: StepFunction1D, M: float, V: float, eps: float) -> BVCodeword1D:
    """Two-part staircase code with round-trip L1 error at most eps."""
    tol = 1e-9
    s = float(np.max(np.abs(f.values)))
    if s > M + tol * max(1.0, M):
        raise ClassViolationError(f"sup |f| = {s} exceeds M = {M}")
    tv = step_total_variation(f)
    if tv > V + tol * max(1.0, V):
        raise ClassViolationError(f"TV(f) = {tv} exceeds V = {V}")
    p = bv_net_params(f.length, M, V, eps)
    f_plus, f_minus = jordan_decompose(f, M)
    parts = []
    for part in (f_plus, f_minus):
        # repair ulp-level monotonicity loss and range overshoot from rounding
        vals = np.clip(np.maximum.accumulate(part.values), 0.0, p.bound)
        parts.append(quantize_monotone(StepFunction1D(f.length, f.k, vals), p))
    return BVCodeword1D(plus=parts[0], minus=parts[1])


def decode_bv_1d(c: BVCodeword1D, p: MonotoneNetParams) -> StepFunction1D:
    g_plus = dequantize_monotone(c.plus, p)
    g_minus = dequantize_monotone(c.minus, p)
    return StepFunction1D(p.length, p.k, g_plus.values - g_minus.values)


def entropy_bound_1d(L: float, M: float, V: float, eps: float) -> int:
    """Bits sufficient for the class {f: [0,L] -> [0,M], TV <= V} at accuracy eps.

    Valid for 0 < eps < L(M+V)/6; returns 8*floor(L(M+V)/eps).  The range
    gate compares the exact rational values of the float arguments, so an eps
    that is strictly inside the range only because of its own rounding (such
    as float(1/3) for L = M = V = 1) is still accepted.
    """
    if not (eps > 0 and 6 * Fraction(eps) < Fraction(L) * (Fraction(M) + Fraction(V))):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {L * (M + V)}/6)"
        )
    return 8 * math.floor(L * (M + V) / eps)


def random_step(length: float, k: int, M: float, V: float, seed: int) -> StepFunction1D:
    """Deterministic random step function into [0, M] with variation <= V."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, M, size=k)
    tv = math.fsum(np.abs(np.diff(x))) if k > 1 else 0.0
    if tv > 0:
        c = min(1.0, (V * (1.0 - 1e-12)) / tv)
        x = np.clip(x.mean() + c * (x - x.mean()), 0.0, M)
    return StepFunction1D(length, k, x)
