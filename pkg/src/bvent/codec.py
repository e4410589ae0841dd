"""End-to-end coder for grid functions with a certified L1 distortion bound.

Pipeline: average onto the selected resolution, read the cells in snake
order, code the resulting 1-D function with the two-part staircase code at
accuracy 2*eps', decode by projecting the staircase back onto the snake cells.
The total distortion is at most eps by construction:  averaging costs at most
(L*sqrt(n)/N)*V <= eps/2 and the 1-D stage at most 2*eps'*(L/N)^(n-1) = eps/2.

Bitstream layout (little-endian):

    magic "BVE1" | n: u8 | N: u32 | L, M, V, eps: f64 each
    then twice (plus part, minus part):
        byte length: u32 | codeword rank, big-endian magnitude

The payload bit accounting covers the two codeword ranks only; the fixed-size
header is not part of the entropy budget.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from . import bv1d
from ._bigint import ceil_log2
from .errors import ClassViolationError, ParseError, RangeError
from .grids import BVClassParams, GridFunction, cell_average, class_membership
from .snake import (
    UpperBoundParams,
    flatten,
    gamma_constant,
    select_upper_params,
    snake_order,
    unflatten,
    validity_check,
)

__all__ = [
    "EncodedBV",
    "encode",
    "decode",
    "bit_length",
    "payload_bits",
    "theoretical_bit_budget",
    "serialize",
    "parse",
]

MAGIC = b"BVE1"
_HEADER = struct.Struct("<BIdddd")  # n, N, L, M, V, eps

# Library-side guard against accidentally huge pipelines; the CLI applies its
# own (configurable) cap on top of this.
_CELL_CAP = 10_000_000


@dataclass(frozen=True, eq=False)
class EncodedBV:
    """Coded function: class header plus the two codeword ranks.

    The derived quantities (N, eps', net geometry) are recomputed from the
    header on construction and must match; this keeps parsed streams honest.
    """

    params: BVClassParams
    eps: float
    upper: UpperBoundParams
    rank_plus: int
    rank_minus: int

    def __post_init__(self):
        if not validity_check(self.params, self.eps):
            raise RangeError(
                f"eps = {self.eps} outside the admissible range "
                f"(0, {self.params.M * self.params.L ** self.params.n / 8.0})"
            )
        up = select_upper_params(self.params, self.eps)
        if up != self.upper:
            raise ParseError(
                f"header inconsistent: (N, eps') = ({self.upper.N}, "
                f"{self.upper.eps_prime}) but selection gives ({up.N}, {up.eps_prime})"
            )
        size = bv1d.monotone_net_size(self.net_params())
        for name, rank in (("plus", self.rank_plus), ("minus", self.rank_minus)):
            if not (0 <= rank < size):
                raise ParseError(f"{name} rank outside the net of size {size}")

    def net_params(self) -> bv1d.MonotoneNetParams:
        """Staircase net shared by both parts (derived from the header)."""
        return bv1d.bv_net_params(
            self.upper.L_N, self.params.M, self.upper.beta_N,
            2.0 * self.upper.eps_prime,
        )


def encode(u: GridFunction, p: BVClassParams, eps: float,
           cell_cap: int = _CELL_CAP) -> EncodedBV:
    """Code u with certified distortion: l1_distance(u, decode(encode(u))) <= eps."""
    report = class_membership(u, p)
    if not report.member:
        raise ClassViolationError(
            f"function outside the class: sup={report.sup} (M={p.M}), "
            f"tv={report.tv} (V={p.V})"
        )
    if not validity_check(p, eps):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {p.M * p.L ** p.n / 8.0})"
        )
    up = select_upper_params(p, eps)
    if up.N**p.n > cell_cap:
        raise RangeError(
            f"selected resolution needs {up.N}^{p.n} cells, above the cap {cell_cap}"
        )
    ubar = cell_average(u, up.N)
    f = flatten(ubar, snake_order(p.n, up.N))
    # transported variation must stay within budget; a failure here would void
    # the distortion certificate
    tv = bv1d.step_total_variation(f)
    if tv > up.beta_N * (1.0 + 1e-9):
        raise AssertionError(f"variation transport violated: {tv} > {up.beta_N}")
    cw = bv1d.encode_bv_1d(f, p.M, up.beta_N, 2.0 * up.eps_prime)
    net = bv1d.bv_net_params(up.L_N, p.M, up.beta_N, 2.0 * up.eps_prime)
    return EncodedBV(
        params=p,
        eps=eps,
        upper=up,
        rank_plus=bv1d.codeword_rank(cw.plus, net),
        rank_minus=bv1d.codeword_rank(cw.minus, net),
    )


def decode(c: EncodedBV, clamp: bool = True) -> GridFunction:
    """Reconstruct the coded function at resolution N.

    Values are clamped to [-M, M]; quantization may overshoot by one level and
    clamping never increases the L1 error against a function bounded by M.
    (clamp=False exists only for fault-injection tests of the verify harness.)
    """
    net = c.net_params()
    cw = bv1d.BVCodeword1D(
        plus=bv1d.codeword_unrank(c.rank_plus, net),
        minus=bv1d.codeword_unrank(c.rank_minus, net),
    )
    g = bv1d.decode_bv_1d(cw, net)
    n, N = c.params.n, c.upper.N
    f_hat = bv1d.resample_step(g, N**n)
    if clamp:
        vals = np.clip(f_hat.values, -c.params.M, c.params.M)
        f_hat = bv1d.StepFunction1D(f_hat.length, f_hat.k, vals)
    return unflatten(f_hat, snake_order(n, N), c.params.L)


def bit_length(c: EncodedBV) -> int:
    """Exact payload bits: ceil(log2(net size)) for each of the two parts."""
    size = bv1d.monotone_net_size(c.net_params())
    return 2 * ceil_log2(size)


def payload_bits(p: BVClassParams, eps: float) -> int:
    """bit_length of any stream for this (class, eps); content-independent."""
    if not validity_check(p, eps):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {p.M * p.L ** p.n / 8.0})"
        )
    up = select_upper_params(p, eps)
    net = bv1d.bv_net_params(up.L_N, p.M, up.beta_N, 2.0 * up.eps_prime)
    return 2 * ceil_log2(bv1d.monotone_net_size(net))


def theoretical_bit_budget(p: BVClassParams, eps: float) -> tuple[int, float]:
    """The two printed budgets: 1-D bound at the selected stage, and Gamma/eps^n."""
    if not validity_check(p, eps):
        raise RangeError(
            f"eps = {eps} outside the admissible range (0, {p.M * p.L ** p.n / 8.0})"
        )
    up = select_upper_params(p, eps)
    lemma_bits = 8 * math.floor(up.L_N * (up.beta_N + 2.0 * p.M) / up.eps_prime)
    gamma_bits = gamma_constant(p) / eps**p.n
    return lemma_bits, gamma_bits


def _pack_rank(rank: int) -> bytes:
    mag = rank.to_bytes((rank.bit_length() + 7) // 8, "big") if rank else b""
    return struct.pack("<I", len(mag)) + mag


def serialize(c: EncodedBV) -> bytes:
    """Deterministic bitstream; re-serializing a parsed stream is byte-identical."""
    p = c.params
    out = [MAGIC, _HEADER.pack(p.n, c.upper.N, p.L, p.M, p.V, c.eps)]
    out.append(_pack_rank(c.rank_plus))
    out.append(_pack_rank(c.rank_minus))
    return b"".join(out)


def parse(data: bytes) -> EncodedBV:
    """Strict parser: rejects unknown magic, truncation and trailing garbage."""
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise ParseError("bad magic bytes (expected BVE1)")
    pos = len(MAGIC)
    if len(data) < pos + _HEADER.size:
        raise ParseError("truncated header")
    n, N, big_l, big_m, big_v, eps = _HEADER.unpack_from(data, pos)
    pos += _HEADER.size
    ranks = []
    for part in ("plus", "minus"):
        if len(data) < pos + 4:
            raise ParseError(f"truncated {part} length")
        (nbytes,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if len(data) < pos + nbytes:
            raise ParseError(f"truncated {part} payload")
        ranks.append(int.from_bytes(data[pos : pos + nbytes], "big"))
        pos += nbytes
    if pos != len(data):
        raise ParseError(f"{len(data) - pos} trailing bytes after payload")
    try:
        params = BVClassParams(n=n, L=big_l, M=big_m, V=big_v)
    except ValueError as exc:
        raise ParseError(f"bad header fields: {exc}") from exc
    upper = select_upper_params(params, eps) if eps > 0 else None
    if upper is None or upper.N != N:
        raise ParseError(
            f"header resolution N={N} does not match the selection for eps={eps}"
        )
    try:
        return EncodedBV(params=params, eps=eps, upper=upper,
                         rank_plus=ranks[0], rank_minus=ranks[1])
    except RangeError as exc:
        raise ParseError(str(exc)) from exc
