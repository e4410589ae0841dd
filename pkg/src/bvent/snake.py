"""Boustrophedon cell ordering and the reduction of cube functions to 1-D.

Consecutive cells in the snake order are face-adjacent, so reading the cell
values of a grid function along the order gives a step function on an
interval whose variation is at most twice the n-dimensional variation scaled
by (N/L)^(n-1).  This module also houses the resolution/accuracy selection
for the coding pipeline and the constant of its bit-cost bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bv1d import StepFunction1D
from .errors import DomainMismatchError, RangeError
from .grids import BVClassParams, GridFunction, box_interior_jump_mass, cell_average

__all__ = [
    "SnakeOrder",
    "UpperBoundParams",
    "NeighborDiffReport",
    "snake_order",
    "flatten",
    "unflatten",
    "neighbor_diff_check",
    "select_upper_params",
    "validity_check",
    "gamma_constant",
]


@dataclass(frozen=True, eq=False)
class SnakeOrder:
    """Permutation of {0..N-1}^n in which consecutive entries differ by one step.

    coords[j] is the j-th multi-index (coordinate axis order, axis 1 first);
    flat[j] is its flat index; inverse[flat[j]] = j.
    """

    n: int
    N: int
    coords: np.ndarray
    flat: np.ndarray
    inverse: np.ndarray


def _snake_coords(n: int, N: int) -> np.ndarray:
    if n == 1:
        return np.arange(N, dtype=np.int64)[:, None]
    sub = _snake_coords(n - 1, N)
    blocks = []
    for t in range(N):
        layer = sub if t % 2 == 0 else sub[::-1]
        col = np.full((layer.shape[0], 1), t, dtype=np.int64)
        blocks.append(np.hstack([layer, col]))
    return np.vstack(blocks)


@lru_cache(maxsize=16)
def snake_order(n: int, N: int) -> SnakeOrder:
    """Boustrophedon order: axis 1 sweeps alternately, nested under axis 2, etc."""
    if n < 1 or N < 1:
        raise ValueError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    coords = _snake_coords(n, N)
    flat = coords @ (N ** np.arange(n, dtype=np.int64))
    inverse = np.empty(N**n, dtype=np.int64)
    inverse[flat] = np.arange(N**n, dtype=np.int64)
    for a in (coords, flat, inverse):
        a.setflags(write=False)
    return SnakeOrder(n=n, N=N, coords=coords, flat=flat, inverse=inverse)


def flatten(u: GridFunction, s: SnakeOrder) -> StepFunction1D:
    """Step function on [0, L*N^(n-1)) reading u's cells in snake order.

    Cell j of the result has width L/N and carries the value of snake cell j.
    """
    if u.n != s.n or u.N != s.N:
        raise DomainMismatchError(
            f"snake order is for (n={s.n}, N={s.N}), function has (n={u.n}, N={u.N})"
        )
    length = u.L * float(u.N) ** (u.n - 1)
    return StepFunction1D(length, u.N**u.n, u.values[s.flat])


def unflatten(f: StepFunction1D, s: SnakeOrder, L: float) -> GridFunction:
    """Inverse of flatten: unflatten(flatten(u, s), s, u.L) == u exactly."""
    if f.k != s.N**s.n:
        raise DomainMismatchError(
            f"step function has {f.k} cells, snake order expects {s.N**s.n}"
        )
    values = np.empty(f.k)
    values[s.flat] = f.values
    return GridFunction(s.n, L, s.N, values)


@dataclass(frozen=True)
class NeighborDiffReport:
    pairs_checked: int
    worst_ratio: float
    passed: bool


def neighbor_diff_check(u_fine: GridFunction, N: int,
                        slack: float = 1e-9) -> NeighborDiffReport:
    """Check the coarse-average neighbor estimate against the local variation.

    For the averages at resolution N, every interior adjacent pair must obey
    |avg(next) - avg(cell)| <= (N/L)^(n-1) * |Du|(interior of the union),
    where the right side uses jumps of u_fine strictly inside the union of the
    two coarse cells (the shared face lies in that interior and counts).
    """
    if N > u_fine.N:
        raise ValueError(f"coarse resolution N={N} exceeds fine resolution {u_fine.N}")
    means = cell_average(u_fine, N).as_nd()
    factor = (N / u_fine.L) ** (u_fine.n - 1)
    worst = 0.0
    count = 0
    ok = True
    for ax in range(u_fine.n):
        for idx in np.ndindex(*([N] * u_fine.n)):
            if idx[ax] >= N - 1:
                continue
            nxt = list(idx)
            nxt[ax] += 1
            lhs = abs(float(means[tuple(nxt)]) - float(means[idx]))
            lo = tuple(int(i) for i in idx)
            hi = tuple(int(i) + (2 if j == ax else 1) for j, i in enumerate(idx))
            rhs = factor * box_interior_jump_mass(u_fine, lo, hi, N)
            count += 1
            if rhs > 0:
                worst = max(worst, lhs / rhs)
            if lhs > rhs + slack * max(1.0, rhs):
                ok = False
    return NeighborDiffReport(pairs_checked=count, worst_ratio=worst, passed=ok)


@dataclass(frozen=True)
class UpperBoundParams:
    """Resolution and 1-D accuracy driving the coding pipeline.

    L_N = L*N^(n-1) is the length of the snake interval and beta_N the
    variation budget transported onto it.
    """

    N: int
    eps_prime: float
    L_N: float
    beta_N: float


def select_upper_params(p: BVClassParams, eps: float) -> UpperBoundParams:
    """N = floor(2*sqrt(n)*L*V/eps) + 1 and eps' = N^(n-1)*eps/(4L^(n-1))."""
    if not (math.isfinite(eps) and eps > 0):
        raise RangeError(f"eps must be positive, got {eps!r}")
    N = int(math.floor(2.0 * math.sqrt(p.n) * p.L * p.V / eps)) + 1
    eps_prime = float(N) ** (p.n - 1) * eps / (4.0 * p.L ** (p.n - 1))
    return UpperBoundParams(
        N=N,
        eps_prime=eps_prime,
        L_N=p.L * float(N) ** (p.n - 1),
        beta_N=2.0 * p.V * (N / p.L) ** (p.n - 1),
    )


def validity_check(p: BVClassParams, eps: float) -> bool:
    """True iff eps < M*L^n/8 (strict); also verifies the internal 1-D range.

    The admissibility gate is evaluated on the exact rational values of the
    float arguments, so the boundary is excluded exactly.  The selected
    accuracy must satisfy eps' <= L_N*(beta_N + 2M)/6 for the 1-D bound to
    apply; that is implied by eps < M*L^n/8 and re-checked here.
    """
    if not (math.isfinite(eps) and eps > 0):
        return False
    if not (8 * Fraction(eps) < Fraction(p.M) * Fraction(p.L) ** p.n):
        return False
    up = select_upper_params(p, eps)
    limit = up.L_N * (up.beta_N + 2.0 * p.M) / 6.0
    if up.eps_prime > limit:
        raise AssertionError(
            f"internal range condition failed: eps'={up.eps_prime} > {limit}"
        )
    return True


def gamma_constant(p: BVClassParams) -> float:
    """Constant of the (1/eps^n)-scale bit-cost bound for the class."""
    n, L, M, V = p.n, p.L, p.M, p.V
    return (8.0 / math.sqrt(n)) * (4.0 * math.sqrt(n) * L * V) ** n + (
        2.0 ** (n + 7) * V / M + 8.0
    ) * (M * L**n / 8.0) ** n
