"""Packing families, exact counting, and small exact covering numbers."""

import math

import numpy as np
import pytest

from bvent.errors import RangeError
from bvent.grids import BVClassParams, GridFunction, class_membership, l1_distance, total_variation
from bvent.packing import (
    CountReport,
    DeltaIndex,
    PackingFamily,
    ball_count_exact,
    brute_force_cover_number,
    greedy_ball_cover,
    hoeffding_bound,
    hoeffding_dominates,
    l1_from_hamming,
    lower_entropy_bound,
    make_packing_family,
    make_packing_function,
    packing_certificate,
    packing_tv_check,
    select_lower_params,
)

P1 = BVClassParams(1, 1.0, 1.0, 1.0)
P2 = BVClassParams(2, 1.0, 1.0, 1.0)


def family_points(fam: PackingFamily):
    m = fam.size()
    return [
        make_packing_function(DeltaIndex.from_int(x, m), fam) for x in range(2**m)
    ]


class TestSelectLowerParams:
    def test_example_n1(self):
        N, h = select_lower_params(P1, 0.01)
        assert N == 12
        assert h == pytest.approx(1.0 / 12.0, rel=1e-15)
        assert 0.01 <= h / 8.0 + 1e-15

    def test_too_large(self):
        with pytest.raises(RangeError):
            select_lower_params(P1, 0.2)

    def test_example_n2(self):
        N, h = select_lower_params(P2, 0.005)
        assert N == 12
        assert h == pytest.approx(1.0 / 24.0, rel=1e-15)

    def test_validity_gate(self):
        with pytest.raises(RangeError):
            select_lower_params(P1, 0.125)


class TestPackingFunctions:
    def test_all_zero(self):
        fam = make_packing_family(P1, 2)
        u = make_packing_function(DeltaIndex(np.zeros(2, dtype=np.uint8)), fam)
        assert np.all(u.values == 0)

    def test_all_one(self):
        fam = make_packing_family(P1, 2)
        u = make_packing_function(DeltaIndex(np.ones(2, dtype=np.uint8)), fam)
        assert np.all(u.values == fam.h)
        assert total_variation(u) == 0.0

    def test_single_jump(self):
        fam = PackingFamily(n=1, N=2, L=1.0, h=1.0)
        u = make_packing_function(DeltaIndex(np.array([1, 0], dtype=np.uint8)), fam)
        assert u.values.tolist() == [1.0, 0.0]
        assert total_variation(u) == 1.0

    def test_length_mismatch(self):
        fam = make_packing_family(P1, 3)
        with pytest.raises(ValueError):
            make_packing_function(DeltaIndex(np.zeros(2, dtype=np.uint8)), fam)


class TestPackingTV:
    def test_n1_exhaustive(self):
        fam = PackingFamily(n=1, N=2, L=1.0, h=1.0)
        # oracle: worst of the four selectors is (1,0) or (0,1) with TV 1
        worst = max(total_variation(u) for u in family_points(fam))
        assert worst == 1.0 <= 2.0
        rep = packing_tv_check(fam, BVClassParams(1, 1.0, 1.0, 2.0))
        assert rep.exhaustive and rep.worst_tv == 1.0 and rep.passed

    def test_n2_checkerboard(self):
        fam = PackingFamily(n=2, N=2, L=1.0, h=1.0)
        rep = packing_tv_check(fam, BVClassParams(2, 1.0, 1.0, 4.0))
        assert rep.worst_tv == 2.0 and rep.tv_limit == 4.0 and rep.passed

    def test_exhaustive_at_sixteen_cells(self):
        fam = make_packing_family(P2, 4)  # 2^16 selectors, vectorized sweep
        rep = packing_tv_check(fam, P2)
        assert rep.exhaustive and rep.checked == 2**16 and rep.passed

    def test_sampled_path(self):
        fam = make_packing_family(P2, 5)
        rep = packing_tv_check(fam, P2)
        assert not rep.exhaustive and rep.passed

    @pytest.mark.parametrize("p,N", [(P1, 1), (P1, 2), (P1, 3), (P2, 1), (P2, 2)])
    def test_membership_exhaustive(self, p, N):
        fam = make_packing_family(p, N)
        for u in family_points(fam):
            assert class_membership(u, p).member


class TestHammingDistance:
    def test_zero(self):
        fam = make_packing_family(P1, 2)
        assert l1_from_hamming(0, fam) == 0.0

    def test_single_cell(self):
        fam = PackingFamily(n=1, N=2, L=1.0, h=1.0)
        assert l1_from_hamming(1, fam) == 0.5

    def test_range(self):
        fam = make_packing_family(P1, 2)
        with pytest.raises(RangeError):
            l1_from_hamming(3, fam)

    def test_exhaustive_match_n1_N3(self):
        fam = make_packing_family(P1, 3)
        pts = family_points(fam)
        m = fam.size()
        for a in range(2**m):
            for b in range(2**m):
                d = bin(a ^ b).count("1")
                assert l1_distance(pts[a], pts[b]) == l1_from_hamming(d, fam)


class TestCounting:
    def test_examples(self):
        assert ball_count_exact(5, 0) == 1
        assert ball_count_exact(4, 1) == 5
        assert ball_count_exact(6, 2) == 22

    def test_matches_sum_oracle(self):
        for m in (1, 7, 13, 40):
            for k in (0, 1, m // 2, m):
                assert ball_count_exact(m, k) == sum(math.comb(m, r) for r in range(k + 1))

    def test_range(self):
        with pytest.raises(RangeError):
            ball_count_exact(4, 5)

    def test_hoeffding_examples(self):
        assert hoeffding_bound(4, 1) == pytest.approx(16 * math.exp(-0.5), rel=1e-12)
        assert hoeffding_bound(4, 1) >= 5
        assert hoeffding_bound(4, 2) == 16.0 >= 11
        with pytest.raises(RangeError):
            hoeffding_bound(4, 3)

    def test_hoeffding_dominates_small(self):
        for m in range(1, 33):
            for k in range(m // 2 + 1):
                assert hoeffding_dominates(m, k)

    def test_hoeffding_overflow_safe(self):
        assert hoeffding_bound(1200, 600) == math.inf  # 2^1200 overflows float
        assert hoeffding_bound(1200, 0) < math.inf
        assert hoeffding_dominates(1200, 600)
        assert hoeffding_dominates(1200, 0)


class TestLowerEntropyBound:
    def test_example_n1(self):
        assert lower_entropy_bound(P1, 0.01) == pytest.approx(2.1640, abs=1e-4)

    def test_floor_vanishes(self):
        # admissible eps with V*L/(2^(n+2)*eps) < 1: the floor kills the bound
        small_v = BVClassParams(1, 1.0, 1.0, 0.5)
        assert lower_entropy_bound(small_v, 0.1) == 0.0

    def test_example_n2(self):
        assert lower_entropy_bound(P2, 0.005) == pytest.approx(25.97, abs=0.01)

    def test_monotone_nonincreasing(self):
        vals = [lower_entropy_bound(P1, e) for e in np.linspace(0.001, 0.12, 40)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_range(self):
        with pytest.raises(RangeError):
            lower_entropy_bound(P1, 0.125)


class TestExactCover:
    def test_single_point(self):
        pts = [GridFunction(1, 1.0, 1, np.array([0.0]))]
        assert brute_force_cover_number(pts, 0.1) == 1

    def test_all_close(self):
        pts = [GridFunction(1, 1.0, 1, np.array([v])) for v in (0.0, 0.01, 0.02)]
        assert brute_force_cover_number(pts, 0.1) == 1

    def test_spread_family(self):
        # 4 functions, min pairwise distance 0.5 > 2*0.2
        fam = PackingFamily(n=1, N=2, L=1.0, h=1.0)
        assert brute_force_cover_number(family_points(fam), 0.2) == 4

    def test_cap(self):
        pts = [GridFunction(1, 1.0, 1, np.array([float(i)])) for i in range(25)]
        with pytest.raises(RangeError):
            brute_force_cover_number(pts, 0.1)

    def test_matches_structured_instance(self):
        # two tight clusters of three points each: exactly 2 sets
        pts = [GridFunction(1, 1.0, 1, np.array([v]))
               for v in (0.0, 0.001, 0.002, 5.0, 5.001, 5.002)]
        assert brute_force_cover_number(pts, 0.05) == 2

    def test_greedy_ball_upper(self):
        fam = PackingFamily(n=1, N=2, L=1.0, h=1.0)
        pts = family_points(fam)
        assert greedy_ball_cover(pts, 0.2) >= brute_force_cover_number(pts, 0.2) / 2


class TestCertificate:
    def test_example_n1(self):
        rep = packing_certificate(P1, 0.01)
        assert (rep.m, rep.k) == (12, 2)
        assert rep.exact_count == 1 + 12 + 66 == 79
        assert rep.lower_entropy_bits == pytest.approx(12 - math.log2(79), rel=1e-12)
        assert rep.lower_entropy_bits >= rep.closed_form_bits
        assert rep.hoeffding >= rep.exact_count

    def test_sweep_assertions_hold(self):
        for eps in np.linspace(0.002, 0.1, 25):
            try:
                rep = packing_certificate(P1, float(eps))
            except RangeError:
                continue
            assert rep.closed_form_bits <= rep.lower_entropy_bits + 1e-9

    def test_single_cell_family(self):
        # smallest admissible instance: m = 1
        N, h = select_lower_params(P1, 0.07)
        assert N == 1
        rep = packing_certificate(P1, 0.07)
        assert rep.m == 1 and rep.exact_count in (1, 2)

    def test_report_invariant_enforced(self):
        with pytest.raises(AssertionError):
            CountReport(m=4, k=1, exact_count=100, hoeffding=9.7,
                        lower_entropy_bits=0.0, closed_form_bits=0.0, N=2, h=1.0)

    def test_count_cap(self):
        with pytest.raises(RangeError):
            packing_certificate(P1, 0.002, count_cap=10)


class TestSandwich:
    @pytest.mark.parametrize("p,eps", [(P1, 0.07), (P1, 0.05), (P1, 0.04), (P2, 0.05)])
    def test_cover_at_least_counting_bound(self, p, eps):
        N, h = select_lower_params(p, eps)
        fam = make_packing_family(p, N, h)
        m = fam.size()
        assert 2**m <= 20
        pts = family_points(fam)
        cover = brute_force_cover_number(pts, eps)
        k = int(math.floor(2.0 * eps * float(N) ** p.n / (h * p.L**p.n)))
        count = ball_count_exact(m, min(k, m))
        # exact integer comparison of cover >= 2^m / count
        assert cover * count >= 2**m
