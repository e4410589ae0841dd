"""Packing lower bounds: indicator families, exact tail counts, and small
exact covering numbers.

The family places a bump of height h on an arbitrary subset of the N^n cells;
all 2^(N^n) members stay inside the function class once h respects the
variation budget.  L1 distances inside the family are exactly Hamming
distances scaled by one cell's mass, which turns covering-number bounds into
binomial tail counts.  Counting is exact big-integer arithmetic; floats enter
only in final log/exp conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from ._bigint import int_log2
from .errors import RangeError
from .grids import BVClassParams, GridFunction, l1_distance, total_variation

__all__ = [
    "PackingFamily",
    "DeltaIndex",
    "CountReport",
    "PackingTVReport",
    "select_lower_params",
    "make_packing_family",
    "make_packing_function",
    "packing_tv_check",
    "l1_from_hamming",
    "ball_count_exact",
    "hoeffding_bound",
    "hoeffding_dominates",
    "lower_entropy_bound",
    "brute_force_cover_number",
    "greedy_ball_cover",
    "packing_certificate",
]

# Exact minimum covers are solved only for tiny point sets.
DEFAULT_COVER_CAP = 20
# Exact binomial tail sums are capped at this many cells.
DEFAULT_COUNT_CAP = 2**20


@dataclass(frozen=True)
class PackingFamily:
    """Indicator family on the N^n grid with bump height h.

    Use make_packing_family to construct one checked against a class: the
    admissible height is h <= min(M, V / (2^(n-1) * L^(n-1) * N)).
    """

    n: int
    N: int
    L: float
    h: float

    def size(self) -> int:
        return self.N**self.n


@dataclass(frozen=True, eq=False)
class DeltaIndex:
    """Cell selector: one bit per grid cell, flat order."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8)
        if b.ndim != 1 or not np.all((b == 0) | (b == 1)):
            raise ValueError("bits must be a 1-D 0/1 array")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @classmethod
    def from_int(cls, x: int, m: int) -> "DeltaIndex":
        return cls(np.array([(x >> i) & 1 for i in range(m)], dtype=np.uint8))


def max_packing_height(p: BVClassParams, N: int) -> float:
    return min(p.M, p.V / (2.0 ** (p.n - 1) * p.L ** (p.n - 1) * N))


def make_packing_family(p: BVClassParams, N: int, h: float | None = None) -> PackingFamily:
    """Family checked against the class: h defaults to the largest admissible."""
    if N < 1:
        raise RangeError(f"N must be >= 1, got {N}")
    h_max = max_packing_height(p, N)
    if h is None:
        h = h_max
    if not (0 < h <= h_max * (1.0 + 1e-12)):
        raise RangeError(f"height h = {h} outside (0, {h_max}]")
    return PackingFamily(n=p.n, N=N, L=p.L, h=h)


def select_lower_params(p: BVClassParams, eps: float) -> tuple[int, float]:
    """N = floor(V*L / (2^(n+2)*eps)) and the matching admissible height.

    Requires 0 < eps < M*L^n/8 and a resulting N >= 1; the selection
    guarantees eps <= h*L^n/8, which the tail-count argument needs.
    """
    if not (eps > 0 and 8 * Fraction(eps) < Fraction(p.M) * Fraction(p.L) ** p.n):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {p.M * p.L ** p.n / 8.0})"
        )
    N = int(math.floor(p.V * p.L / (2.0 ** (p.n + 2) * eps)))
    if N < 1:
        raise RangeError(f"eps = {eps} too large for this class (selected N = 0)")
    h = max_packing_height(p, N)
    if 8.0 * eps > h * p.L**p.n * (1.0 + 1e-12):
        raise AssertionError(f"height condition failed: 8*eps = {8 * eps} > {h * p.L ** p.n}")
    return N, h


def make_packing_function(d: DeltaIndex, f: PackingFamily) -> GridFunction:
    if d.bits.size != f.size():
        raise ValueError(f"selector has {d.bits.size} bits, family needs {f.size()}")
    return GridFunction(f.n, f.L, f.N, f.h * d.bits.astype(np.float64))


def _all_family_tv(f: PackingFamily) -> np.ndarray:
    """Variation of every member, vectorized over all 2^(N^n) selectors."""
    m = f.size()
    sel = ((np.arange(2**m, dtype=np.int64)[:, None] >> np.arange(m)) & 1)
    vals = (f.h * sel.astype(np.float64)).reshape((2**m,) + (f.N,) * f.n)
    face = (f.L / f.N) ** (f.n - 1)
    tv = np.zeros(2**m)
    for ax in range(1, f.n + 1):
        tv += np.abs(np.diff(vals, axis=ax)).reshape(2**m, -1).sum(axis=1)
    return tv * face


@dataclass(frozen=True)
class PackingTVReport:
    checked: int
    exhaustive: bool
    worst_tv: float
    tv_limit: float  # (2L)^(n-1) * N * h
    within_class: bool
    passed: bool


def packing_tv_check(f: PackingFamily, p: BVClassParams,
                     samples: int = 256, seed: int = 0) -> PackingTVReport:
    """Verify max TV over selectors <= (2L)^(n-1)*N*h <= V and sup <= M.

    Exhaustive for N^n <= 16, seeded sampling (plus the worst-case
    checkerboard) otherwise.  This must always pass for a checked family.
    """
    m = f.size()
    limit = (2.0 * f.L) ** (f.n - 1) * f.N * f.h
    if m <= 16:
        tvs = _all_family_tv(f)
        worst = float(tvs.max())
        checked = tvs.size
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        worst = 0.0
        checked = 0
        coords = np.indices((f.N,) * f.n).sum(axis=0).ravel() % 2
        candidates = [coords.astype(np.uint8)]
        candidates += [rng.integers(0, 2, size=m).astype(np.uint8)
                       for _ in range(samples)]
        for bits in candidates:
            u = make_packing_function(DeltaIndex(bits), f)
            worst = max(worst, total_variation(u))
            checked += 1
        exhaustive = False
    slack = 1e-9 * max(1.0, limit)
    within = limit <= p.V * (1.0 + 1e-12) and f.h <= p.M * (1.0 + 1e-12)
    return PackingTVReport(
        checked=checked,
        exhaustive=exhaustive,
        worst_tv=worst,
        tv_limit=limit,
        within_class=within,
        passed=(worst <= limit + slack) and within,
    )


def l1_from_hamming(dist: int, f: PackingFamily) -> float:
    """L1 distance between members at Hamming distance dist: dist*h*L^n/N^n."""
    if not (0 <= dist <= f.size()):
        raise RangeError(f"Hamming distance {dist} outside [0, {f.size()}]")
    return (dist * f.h) * (f.L**f.n / float(f.N) ** f.n)


def ball_count_exact(m: int, k: int) -> int:
    """Exact sum_{r<=k} C(m, r) in integer arithmetic."""
    if not (0 <= k <= m):
        raise RangeError(f"need 0 <= k <= m, got k={k}, m={m}")
    term = gmpy2.mpz(1)
    total = gmpy2.mpz(1)
    for r in range(1, k + 1):
        term = term * (m - r + 1) // r
        total += term
    return int(total)


def hoeffding_bound(m: int, k: int) -> float:
    """Closed-form tail bound 2^m * exp(-2*(m/2 - k)^2 / m), for k <= m/2."""
    if m < 1:
        raise RangeError(f"m must be >= 1, got {m}")
    if not (0 <= 2 * k <= m):
        raise RangeError(f"bound needs k <= m/2, got k={k}, m={m}")
    x = 2.0 * (m / 2.0 - k) ** 2 / m
    try:
        return math.ldexp(math.exp(-x), m)
    except OverflowError:
        return math.inf


def hoeffding_dominates(m: int, k: int) -> bool:
    """Certified comparison ball_count_exact(m,k) <= hoeffding_bound(m,k).

    The float side is rounded down (outward for this inequality): exp carries
    at most 1 ulp error, the (1 - 2^-50) factor pushes the product strictly
    below the true bound, and ldexp scales by a power of two exactly.  The
    integer side is compared exactly (no float conversion of the count).
    """
    if not (0 <= 2 * k <= m):
        raise RangeError(f"bound needs k <= m/2, got k={k}, m={m}")
    x = 2.0 * (m / 2.0 - k) ** 2 / m
    try:
        lower = math.ldexp(math.exp(-x) * (1.0 - 2.0**-50), m)
    except OverflowError:
        return True
    return ball_count_exact(m, k) <= lower


def lower_entropy_bound(p: BVClassParams, eps: float) -> float:
    """Rate floor in bits: (log2 e / 8) * floor(V*L/(2^(n+2)*eps))^n."""
    if not (eps > 0 and 8 * Fraction(eps) < Fraction(p.M) * Fraction(p.L) ** p.n):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {p.M * p.L ** p.n / 8.0})"
        )
    N = math.floor(p.V * p.L / (2.0 ** (p.n + 2) * eps))
    return (math.log2(math.e) / 8.0) * float(N) ** p.n


def _pairwise_adjacency(points: list[GridFunction], eps: float) -> list[int]:
    """Bitmask adjacency of the 'diameter' graph: edge iff l1 <= 2*eps."""
    n = len(points)
    masks = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if l1_distance(points[i], points[j]) <= 2.0 * eps:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def _complement_masks(masks: list[int]) -> list[int]:
    n = len(masks)
    full = (1 << n) - 1
    return [(~masks[v]) & full & ~(1 << v) for v in range(n)]


def _greedy_coloring(masks: list[int], order: list[int]) -> int:
    colors: dict[int, int] = {}
    best = 0
    for v in order:
        used = {colors[u] for u in colors if masks[v] >> u & 1}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
        best = max(best, c + 1)
    return best


def _greedy_clique(masks: list[int], order: list[int]) -> int:
    clique: list[int] = []
    for v in order:
        if all(masks[v] >> u & 1 for u in clique):
            clique.append(v)
    return len(clique)


def _colorable(masks: list[int], order: list[int], t: int) -> bool:
    classes: list[int] = []

    def bt(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        vm = masks[v]
        for ci, cm in enumerate(classes):
            if cm & vm:
                continue
            classes[ci] = cm | (1 << v)
            if bt(i + 1):
                return True
            classes[ci] = cm
        if len(classes) < t:
            classes.append(1 << v)
            if bt(i + 1):
                return True
            classes.pop()
        return False

    return bt(0)


def brute_force_cover_number(points: list[GridFunction], eps: float,
                             cap: int = DEFAULT_COVER_CAP) -> int:
    """Minimal number of sets of diameter <= 2*eps covering the points.

    A set has diameter <= 2*eps iff it is a clique in the graph with edges
    {l1 <= 2*eps}, so this is an exact minimum clique cover, solved as exact
    coloring of the complement graph seeded by a greedy solution.  Diameter
    semantics (not ball semantics); see greedy_ball_cover for the other one.
    """
    if not points:
        return 0
    if len(points) > cap:
        raise RangeError(f"{len(points)} points exceed the exact-cover cap {cap}")
    comp = _complement_masks(_pairwise_adjacency(points, eps))
    n = len(points)
    order = sorted(range(n), key=lambda v: -bin(comp[v]).count("1"))
    upper = _greedy_coloring(comp, order)
    lower = _greedy_clique(comp, order)
    for t in range(lower, upper):
        if _colorable(comp, order, t):
            return t
    return upper


def greedy_ball_cover(points: list[GridFunction], eps: float) -> int:
    """Greedy cover by closed balls B(point, 2*eps); an upper estimate only."""
    remaining = list(range(len(points)))
    count = 0
    while remaining:
        center = remaining[0]
        remaining = [
            j for j in remaining
            if l1_distance(points[center], points[j]) > 2.0 * eps
        ]
        count += 1
    return count


@dataclass(frozen=True)
class CountReport:
    """Exact tail count against the closed-form bounds for one (class, eps)."""

    m: int
    k: int
    exact_count: int
    hoeffding: float
    lower_entropy_bits: float  # log2(2^m / exact_count)
    closed_form_bits: float
    N: int
    h: float

    def __post_init__(self):
        if self.exact_count > 2**self.m:
            raise AssertionError("tail count exceeds the whole cube")
        if 2 * self.k <= self.m and self.hoeffding < self.exact_count:
            raise AssertionError("closed-form tail bound below the exact count")


def packing_certificate(p: BVClassParams, eps: float,
                        count_cap: int = DEFAULT_COUNT_CAP) -> CountReport:
    """Exact lower-bound certificate at accuracy eps.

    k is the largest Hamming radius whose ball stays within L1 distance
    2*eps; the family of 2^m selectors then needs at least 2^m/count sets in
    any cover, i.e. m - log2(count) bits, and the closed-form rate floor must
    sit below that (asserted).
    """
    N, h = select_lower_params(p, eps)
    m = N**p.n
    if m > count_cap:
        raise RangeError(f"m = {m} exceeds the exact counting cap {count_cap}")
    k = int(math.floor(2.0 * eps * float(N) ** p.n / (h * p.L**p.n)))
    k = min(k, m)
    exact = ball_count_exact(m, k)
    hoef = hoeffding_bound(m, k) if 2 * k <= m else math.inf
    bits = m - int_log2(exact)
    closed = lower_entropy_bound(p, eps)
    if closed > bits + 1e-9:
        raise AssertionError(
            f"closed-form bound {closed} exceeds the exact-count bound {bits}"
        )
    return CountReport(m=m, k=k, exact_count=exact, hoeffding=hoef,
                       lower_entropy_bits=bits, closed_form_bits=closed, N=N, h=h)
