"""Piecewise-constant functions on the cube [0,L]^n with exact L1/TV arithmetic.

A grid function stores one value per cell of a uniform N x ... x N partition
of the cube.  Values are kept in a flat array with axis 1 fastest:

    flat(i) = i_1 + N*i_2 + ... + N^(n-1)*i_n

All reductions that feed a certified inequality go through ``math.fsum``
(exactly rounded compensated summation), so results do not depend on
evaluation order and are bit-identical between serial and parallel use.
Every value object is immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatchError, ParseError, RangeError

__all__ = [
    "BVClassParams",
    "GridFunction",
    "MembershipReport",
    "PoincareReport",
    "l1_distance",
    "total_variation",
    "sup_norm",
    "class_membership",
    "cell_average",
    "poincare_check",
    "random_bv",
    "grid_to_json",
    "grid_from_json",
]

# Hard cap on materialized common-refinement grids (cells).
_REFINE_CELL_CAP = 50_000_000


@dataclass(frozen=True)
class BVClassParams:
    """The quadruple (n, L, M, V): dimension, side length, sup bound, TV budget."""

    n: int
    L: float
    M: float
    V: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"dimension n must be a positive integer, got {self.n!r}")
        for name in ("L", "M", "V"):
            x = getattr(self, name)
            if not (math.isfinite(x) and x > 0):
                raise ValueError(f"{name} must be strictly positive and finite, got {x!r}")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Piecewise-constant function on [0,L]^n, one value per cell, flat order.

    Attributes
    ----------
    n : int
        Dimension of the cube.
    L : float
        Side length.
    N : int
        Cells per axis; the value array has exactly N**n entries.
    values : numpy.ndarray
        Read-only float64 array, flat order with axis 1 fastest.
    """

    n: int
    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"dimension n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"side length L must be positive and finite, got {self.L!r}")
        if not (isinstance(self.N, int) and self.N >= 1):
            raise ValueError(f"resolution N must be a positive integer, got {self.N!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.N**self.n,):
            raise ValueError(
                f"values must have length N^n = {self.N**self.n}, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def as_nd(self) -> np.ndarray:
        """Values reshaped to (N,)*n; numpy axis (n-1-j) carries coordinate axis j+1."""
        return self.values.reshape((self.N,) * self.n)

    def cell_volume(self) -> float:
        return (self.L / self.N) ** self.n

    def same_domain(self, other: "GridFunction") -> bool:
        return self.n == other.n and self.L == other.L


def _require_same_domain(u: GridFunction, v: GridFunction) -> None:
    if not u.same_domain(v):
        raise DomainMismatchError(
            f"domain mismatch: (n={u.n}, L={u.L}) vs (n={v.n}, L={v.L})"
        )


def _refine_nd(a: np.ndarray, factor: int) -> np.ndarray:
    """Split every cell into factor^n equal copies (value-preserving refinement)."""
    if factor == 1:
        return a
    for ax in range(a.ndim):
        a = np.repeat(a, factor, axis=ax)
    return a


def l1_distance(u: GridFunction, v: GridFunction) -> float:
    """Exact integral of |u - v| over the cube, on the common refinement grid.

    The two resolutions are refined to lcm(N_u, N_v) cells per axis, where the
    partitions align exactly, so the only inexactness is float rounding of the
    value arithmetic itself.
    """
    _require_same_domain(u, v)
    r = math.lcm(u.N, v.N)
    if r**u.n > _REFINE_CELL_CAP:
        raise RangeError(
            f"common refinement needs {r}^{u.n} cells, above the cap {_REFINE_CELL_CAP}"
        )
    au = _refine_nd(u.as_nd(), r // u.N)
    av = _refine_nd(v.as_nd(), r // v.N)
    diff = np.abs(au - av).ravel()
    # scale applied once so identical diffs give bit-identical results
    return math.fsum(diff) * (u.L**u.n / float(r) ** u.n)


def total_variation(u: GridFunction) -> float:
    """Total variation of the piecewise-constant extension on the open cube.

    Equals (L/N)^(n-1) times the sum of |value jumps| over all interior
    adjacent cell pairs; faces on the boundary of the cube contribute nothing.
    """
    a = u.as_nd()
    if u.N == 1:
        return 0.0
    parts = [np.abs(np.diff(a, axis=ax)).ravel() for ax in range(u.n)]
    face = (u.L / u.N) ** (u.n - 1)
    return math.fsum(np.concatenate(parts)) * face


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    sup: float
    tv: float
    sup_bound: float
    tv_bound: float


def class_membership(u: GridFunction, p: BVClassParams) -> MembershipReport:
    """Test sup_norm(u) <= M and total_variation(u) <= V, reporting both measurements."""
    if u.n != p.n or u.L != p.L:
        raise DomainMismatchError(
            f"domain mismatch: function (n={u.n}, L={u.L}) vs class (n={p.n}, L={p.L})"
        )
    s = sup_norm(u)
    t = total_variation(u)
    return MembershipReport(member=(s <= p.M and t <= p.V), sup=s, tv=t,
                            sup_bound=p.M, tv_bound=p.V)


def _overlap_matrix(n_coarse: int, n_fine: int) -> np.ndarray:
    """Integer overlap lengths W[c, f] between coarse cell c and fine cell f.

    Units are 1/(n_coarse*n_fine) of the side length; each row sums to n_fine.
    """
    c = np.arange(n_coarse, dtype=np.int64)[:, None]
    f = np.arange(n_fine, dtype=np.int64)[None, :]
    lo = np.maximum(c * n_fine, f * n_coarse)
    hi = np.minimum((c + 1) * n_fine, (f + 1) * n_coarse)
    return np.maximum(hi - lo, 0)


def cell_average(u: GridFunction, n_coarse: int) -> GridFunction:
    """Exact area-weighted averages of u on the n_coarse^n partition.

    n_coarse need not divide u.N; cell overlaps are computed with integer
    arithmetic, so the only rounding is in the final weighted sums.
    Averaging onto the function's own grid returns the values unchanged.
    """
    if not (isinstance(n_coarse, int) and n_coarse >= 1):
        raise ValueError(f"n_coarse must be a positive integer, got {n_coarse!r}")
    if n_coarse == u.N:
        return u
    w = _overlap_matrix(n_coarse, u.N).astype(np.float64)
    a = u.as_nd()
    for ax in range(u.n):
        a = np.moveaxis(np.tensordot(w, np.moveaxis(a, ax, 0), axes=(1, 0)), 0, ax)
    a = a / float(u.N) ** u.n
    return GridFunction(u.n, u.L, n_coarse, a.ravel())


def _box_overlap_1d(n_fine: int, num_lo: int, num_hi: int, den: int) -> np.ndarray:
    """Overlap of each fine cell with the interval [num_lo/den, num_hi/den) of [0,1].

    Returned in integer units of 1/(n_fine*den).
    """
    f = np.arange(n_fine, dtype=np.int64)
    lo = np.maximum(f * den, num_lo * n_fine)
    hi = np.minimum((f + 1) * den, num_hi * n_fine)
    return np.maximum(hi - lo, 0)


def _box_weight_tensor(weights: list[np.ndarray]) -> np.ndarray:
    t = weights[0].astype(np.float64)
    for w in weights[1:]:
        t = np.multiply.outer(t, w.astype(np.float64))
    return t


def box_l1_deviation(u: GridFunction, box_lo: tuple[int, ...], box_hi: tuple[int, ...],
                     den: int, center: float) -> float:
    """Integral of |u - center| over the box prod_j [lo_j/den, hi_j/den) * L.

    Box bounds are rationals with common denominator den, in numpy axis order.
    """
    ws = [_box_overlap_1d(u.N, lo, hi, den) for lo, hi in zip(box_lo, box_hi)]
    wt = _box_weight_tensor(ws)
    dev = np.abs(u.as_nd() - center)
    unit = (u.L / (u.N * den)) ** u.n
    return math.fsum((wt * dev).ravel()) * unit


def box_interior_jump_mass(u: GridFunction, box_lo: tuple[int, ...],
                           box_hi: tuple[int, ...], den: int) -> float:
    """Variation of u restricted to the open box prod_j (lo_j/den, hi_j/den) * L.

    Counts jump faces of u whose carrying plane lies strictly inside the box,
    weighted by the (n-1)-measure of the face portion inside it.
    """
    a = u.as_nd()
    ws = [_box_overlap_1d(u.N, lo, hi, den) for lo, hi in zip(box_lo, box_hi)]
    unit = (u.L / (u.N * den)) ** (u.n - 1)
    total_units = []
    for ax in range(u.n):
        lo, hi = box_lo[ax], box_hi[ax]
        # fine plane t/N strictly inside (lo/den, hi/den)  <=>  lo*N < t*den < hi*N
        t = np.arange(1, u.N, dtype=np.int64)
        inside = (lo * u.N < t * den) & (t * den < hi * u.N)
        if not np.any(inside):
            continue
        jumps = np.abs(np.diff(a, axis=ax))
        sel = [slice(None)] * u.n
        sel[ax] = inside
        jumps = jumps[tuple(sel)]
        other = [ws[i] for i in range(u.n) if i != ax]
        if other:
            wt = _box_weight_tensor(other)
            # move face axis last; the remaining axes line up with wt
            jm = np.moveaxis(jumps, ax, -1)
            total_units.append((jm * wt[..., None]).ravel())
        else:
            total_units.append(jumps.ravel())
    if not total_units:
        return 0.0
    return math.fsum(np.concatenate(total_units)) * unit


@dataclass(frozen=True)
class PoincareReport:
    """Per-cell outcome of the mean-deviation vs variation comparison."""

    n_coarse: int
    cells: tuple  # (coordinate index tuple, lhs, rhs) per coarse cell
    passed: bool
    vacuous: bool
    worst_margin: float  # max over cells of lhs - rhs (negative when slack remains)


def poincare_check(u: GridFunction, n_coarse: int,
                   slack: float = 1e-9) -> PoincareReport:
    """Check, per coarse cell O, that  int_O |u - mean| <= (diam(O)/2) * |Du|(int O).

    diam(O) = sqrt(n) * L / n_coarse and the right side counts only jumps of u
    strictly inside O.  The inequality is a theorem for every grid function,
    so the returned flag must never be False; ``slack`` absorbs float rounding.
    """
    if not (isinstance(n_coarse, int) and n_coarse >= 1):
        raise ValueError(f"n_coarse must be a positive integer, got {n_coarse!r}")
    if n_coarse > u.N:
        return PoincareReport(n_coarse, (), True, True, float("-inf"))
    means = cell_average(u, n_coarse).as_nd()
    half_diam = math.sqrt(u.n) * u.L / (2.0 * n_coarse)
    rows = []
    worst = float("-inf")
    ok = True
    for idx in np.ndindex(*([n_coarse] * u.n)):
        lo = tuple(int(i) for i in idx)
        hi = tuple(int(i) + 1 for i in idx)
        lhs = box_l1_deviation(u, lo, hi, n_coarse, float(means[idx]))
        rhs = half_diam * box_interior_jump_mass(u, lo, hi, n_coarse)
        margin = lhs - rhs
        worst = max(worst, margin)
        if lhs > rhs + slack * max(1.0, abs(rhs)):
            ok = False
        rows.append((tuple(reversed(idx)), lhs, rhs))
    return PoincareReport(n_coarse, tuple(rows), ok, False, worst)


def random_bv(p: BVClassParams, N: int, seed: int) -> GridFunction:
    """Deterministic pseudo-random member of the class, rescaled into budget.

    Gaussian cell values are scaled so that the measured sup norm and total
    variation respect M and V with a small margin against float rounding.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(N**p.n)
    probe = GridFunction(p.n, p.L, N, x)
    s = sup_norm(probe)
    t = total_variation(probe)
    scale = math.inf
    if s > 0:
        scale = p.M / s
    if t > 0:
        scale = min(scale, p.V / t)
    if not math.isfinite(scale):
        return GridFunction(p.n, p.L, N, np.zeros(N**p.n))
    scale *= 1.0 - 1e-12
    return GridFunction(p.n, p.L, N, x * scale)


def grid_to_json(u: GridFunction) -> dict:
    """Wire format: {"n": int, "L": float, "N": int, "values": [float, ...]}."""
    return {"n": u.n, "L": u.L, "N": u.N, "values": u.values.tolist()}


def grid_from_json(obj) -> GridFunction:
    if not isinstance(obj, dict):
        raise ParseError("grid JSON must be an object")
    missing = {"n", "L", "N", "values"} - set(obj)
    if missing:
        raise ParseError(f"grid JSON missing keys: {sorted(missing)}")
    n, big_l, big_n, values = obj["n"], obj["L"], obj["N"], obj["values"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("grid JSON field 'n' must be an integer")
    if not isinstance(big_n, int) or isinstance(big_n, bool):
        raise ParseError("grid JSON field 'N' must be an integer")
    if not isinstance(big_l, (int, float)) or isinstance(big_l, bool):
        raise ParseError("grid JSON field 'L' must be a number")
    if not isinstance(values, list):
        raise ParseError("grid JSON field 'values' must be a list")
    if n < 1 or big_n < 1 or len(values) != big_n**n:
        raise ParseError(
            f"grid JSON: expected N^n = {big_n}^{n} values, got {len(values)}"
        )
    try:
        return GridFunction(n, float(big_l), big_n, np.asarray(values, dtype=np.float64))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"grid JSON: {exc}") from exc
