"""Seeded property suite behind the verify command.

Each check certifies one of the inequalities the library is built on, over a
deterministic corpus (seeded random members plus fixed edge cases).  A check
failure means a broken certificate, never statistical noise: all bounds hold
as theorems and the comparisons only allow for float rounding slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import codec
from .bv1d import step_total_variation
from .errors import RangeError
from .grids import (
    BVClassParams,
    GridFunction,
    cell_average,
    class_membership,
    l1_distance,
    poincare_check,
    random_bv,
    sup_norm,
    total_variation,
)
from .snake import flatten, neighbor_diff_check, select_upper_params, snake_order, validity_check

__all__ = ["VerifyConfig", "CheckResult", "run_verify"]

_SLACK = 1e-9


@dataclass(frozen=True)
class VerifyConfig:
    params: BVClassParams
    eps_list: tuple[float, ...] = (0.1, 0.05, 0.02)
    seed: int = 0
    samples: int = 10
    n_fine: int = 8
    inject_fault: str | None = None  # "skip-clamp" disables the decode clamp

    def __post_init__(self):
        if self.samples < 1:
            raise RangeError("sample count must be >= 1")
        for eps in self.eps_list:
            if not validity_check(self.params, eps):
                raise RangeError(
                    f"eps = {eps} outside (0, "
                    f"{self.params.M * self.params.L ** self.params.n / 8.0})"
                )


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float = math.nan
    detail: str = ""
    cases: int = 0

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f" worst={self.worst:.6g}" if not math.isnan(self.worst) else ""
        detail = f" ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}  cases={self.cases}{extra}{detail}"


def _edge_corpus(cfg: VerifyConfig) -> list[GridFunction]:
    p = cfg.params
    cells = cfg.n_fine**p.n
    out = [
        GridFunction(p.n, p.L, cfg.n_fine, np.zeros(cells)),
        GridFunction(p.n, p.L, cfg.n_fine, np.full(cells, p.M)),
        GridFunction(p.n, p.L, cfg.n_fine, np.full(cells, -p.M)),
    ]
    # a single front: one jump surface, in class whenever L^(n-1)*h <= V
    step = np.zeros(cells)
    step[cells // 2 :] = min(p.M, p.V / p.L ** (p.n - 1))
    out.append(GridFunction(p.n, p.L, cfg.n_fine, step))
    return [u for u in out if class_membership(u, p).member]


def run_verify(cfg: VerifyConfig) -> list[CheckResult]:
    p = cfg.params
    randoms = [random_bv(p, cfg.n_fine, cfg.seed + i) for i in range(cfg.samples)]
    corpus = _edge_corpus(cfg) + randoms
    clamp = cfg.inject_fault != "skip-clamp"
    results: list[CheckResult] = []

    member = CheckResult("class membership of generated corpus", True)
    for u in randoms:
        member.cases += 1
        if not class_membership(u, p).member:
            member.passed = False
    results.append(member)

    avg = CheckResult("averaging error <= (L*sqrt(n)/N) * TV", True, worst=0.0)
    transport = CheckResult("snake variation transport <= 2V(N/L)^(n-1)", True, worst=0.0)
    dist = CheckResult("codec distortion <= eps", True, worst=0.0)
    supn = CheckResult("decoded sup norm <= M", True, worst=0.0)
    stream = CheckResult("bitstream round trip byte-identical", True)

    for eps in cfg.eps_list:
        up = select_upper_params(p, eps)
        order = snake_order(p.n, up.N)
        for u in corpus:
            ubar = cell_average(u, up.N)

            err = l1_distance(u, ubar)
            bound = (p.L * math.sqrt(p.n) / up.N) * total_variation(u)
            avg.cases += 1
            avg.worst = max(avg.worst, err - bound)
            if err > bound + _SLACK * max(1.0, bound):
                avg.passed = False

            tv1d = step_total_variation(flatten(ubar, order))
            transport.cases += 1
            transport.worst = max(transport.worst, tv1d - up.beta_N)
            if tv1d > up.beta_N + _SLACK * max(1.0, up.beta_N):
                transport.passed = False

            c = codec.encode(u, p, eps)
            u_hat = codec.decode(c, clamp=clamp)
            d = l1_distance(u, u_hat)
            dist.cases += 1
            dist.worst = max(dist.worst, d - eps)
            if d > eps + _SLACK:
                dist.passed = False

            s = sup_norm(u_hat)
            supn.cases += 1
            supn.worst = max(supn.worst, s - p.M)
            if s > p.M:
                supn.passed = False

            blob = codec.serialize(c)
            stream.cases += 1
            if codec.serialize(codec.parse(blob)) != blob:
                stream.passed = False

    results += [avg, transport, dist, supn, stream]

    poincare = CheckResult("per-cell mean deviation vs local variation", True, worst=0.0)
    for u in corpus:
        for n_coarse in range(1, min(8, u.N) + 1):
            rep = poincare_check(u, n_coarse)
            poincare.cases += 1
            poincare.worst = max(poincare.worst, rep.worst_margin)
            if not rep.passed:
                poincare.passed = False
    results.append(poincare)

    neighbor = CheckResult("coarse neighbor estimate vs local variation", True, worst=0.0)
    for u in corpus:
        for n_coarse in (2, 4):
            if n_coarse > u.N:
                continue
            rep = neighbor_diff_check(u, n_coarse)
            neighbor.cases += 1
            neighbor.worst = max(neighbor.worst, rep.worst_ratio)
            if not rep.passed:
                neighbor.passed = False
    results.append(neighbor)

    return results
