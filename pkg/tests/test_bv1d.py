"""Jordan decomposition, staircase nets and the two-part 1-D code."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvent.bv1d import (
    BVCodeword1D,
    MonotoneCodeword,
    StepFunction1D,
    bv_net_params,
    codeword_rank,
    codeword_unrank,
    decode_bv_1d,
    dequantize_monotone,
    encode_bv_1d,
    entropy_bound_1d,
    jordan_decompose,
    monotone_net_params,
    monotone_net_size,
    quantize_monotone,
    random_step,
    resample_step,
    running_variation,
    step_l1,
    step_total_variation,
)
from bvent.errors import ClassViolationError, ParseError, RangeError


def stepf(length, vals):
    vals = np.asarray(vals, dtype=float)
    return StepFunction1D(length, len(vals), vals)


def enumerate_monotone(k, m):
    """Oracle: all nondecreasing sequences of length k with values in [0, m]."""
    return [
        seq
        for seq in itertools.product(range(m + 1), repeat=k)
        if all(a <= b for a, b in zip(seq, seq[1:]))
    ]


def brute_l1(f: StepFunction1D, g: StepFunction1D) -> float:
    """Oracle: refine both to the lcm partition and sum cellwise."""
    r = math.lcm(f.k, g.k)
    fv = np.repeat(f.values, r // f.k)
    gv = np.repeat(g.values, r // g.k)
    return float(np.sum(np.abs(fv - gv))) * (f.length / r)


class TestStepBasics:
    def test_step_l1_matches_brute(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            f = stepf(2.0, rng.standard_normal(int(rng.integers(1, 9))))
            g = stepf(2.0, rng.standard_normal(int(rng.integers(1, 9))))
            assert step_l1(f, g) == pytest.approx(brute_l1(f, g), rel=1e-12, abs=1e-15)

    def test_resample_matches_brute_means(self):
        rng = np.random.default_rng(1)
        f = stepf(1.0, rng.standard_normal(6))
        got = resample_step(f, 4).values
        r = math.lcm(6, 4)
        fv = np.repeat(f.values, r // 6)
        want = fv.reshape(4, r // 4).mean(axis=1)
        assert np.allclose(got, want, rtol=1e-12)

    def test_resample_is_l1_contraction(self):
        rng = np.random.default_rng(2)
        f = stepf(1.0, rng.standard_normal(12))
        g = stepf(1.0, rng.standard_normal(12))
        for k in (1, 3, 5, 8):
            d = step_l1(resample_step(f, k), resample_step(g, k))
            assert d <= step_l1(f, g) + 1e-12


class TestRunningVariation:
    def test_constant(self):
        assert np.array_equal(running_variation(stepf(1.0, [2.0] * 4)).values, np.zeros(4))

    def test_single_jump(self):
        assert np.array_equal(running_variation(stepf(1.0, [1.0, 0.0])).values, [0.0, 1.0])

    def test_nondecreasing_case(self):
        f = stepf(1.0, [0.0, 0.5, 0.5, 2.0])
        v = running_variation(f).values
        assert np.array_equal(v, f.values - f.values[0])


class TestJordan:
    def test_constant(self):
        f = stepf(1.0, [0.4, 0.4])
        fp, fm = jordan_decompose(f, 1.0)
        assert np.allclose(fp.values, 0.7) and np.allclose(fm.values, 0.3)

    def test_single_drop(self):
        fp, fm = jordan_decompose(stepf(1.0, [1.0, 0.0]), 1.0)
        assert np.array_equal(fm.values, [0.0, 1.0])
        assert np.array_equal(fp.values, [1.0, 1.0])

    def test_nondecreasing_input_gives_constant_minus(self):
        f = stepf(1.0, [-0.5, 0.0, 0.25, 1.0])
        fp, fm = jordan_decompose(f, 1.0)
        assert np.allclose(fm.values, (1.0 - (-0.5)) / 2)

    def test_sup_violation(self):
        with pytest.raises(ClassViolationError):
            jordan_decompose(stepf(1.0, [2.0, 0.0]), 1.0)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.integers(-16, 16), min_size=1, max_size=12))
    def test_exact_on_dyadic_lattice(self, ints):
        # values on a 1/16 lattice keep every float op exact, so the
        # decomposition identities hold bitwise
        f = stepf(1.0, np.array(ints) / 16.0)
        fp, fm = jordan_decompose(f, 1.0)
        assert np.array_equal(fp.values - fm.values, f.values)
        assert np.all(np.diff(fp.values) >= 0)
        assert np.all(np.diff(fm.values) >= 0)
        tv = step_total_variation(f)
        assert (fp.values[-1] - fp.values[0]) + (fm.values[-1] - fm.values[0]) == tv
        bound = (tv + 2.0) / 2.0
        assert np.all(fp.values >= 0) and np.all(fp.values <= bound)
        assert np.all(fm.values >= 0) and np.all(fm.values <= bound)


class TestNetParams:
    def test_degenerate_bound(self):
        p = monotone_net_params(1.0, 0.0, 0.5)
        assert (p.k, p.m) == (1, 0)
        assert monotone_net_size(p) == 1

    def test_examples(self):
        assert (monotone_net_params(1.0, 1.0, 0.5).k, monotone_net_params(1.0, 1.0, 0.5).m) == (8, 8)
        assert monotone_net_params(1.0, 1.0, 0.1).k == 40

    def test_errors(self):
        with pytest.raises(RangeError):
            monotone_net_params(0.0, 1.0, 0.5)
        with pytest.raises(RangeError):
            monotone_net_params(1.0, 1.0, 0.0)


class TestQuantize:
    def test_zero(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        cw = quantize_monotone(stepf(1.0, np.zeros(8)), p)
        assert np.array_equal(cw.levels, np.zeros(8, dtype=np.int64))

    def test_full(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        cw = quantize_monotone(stepf(1.0, np.ones(8)), p)
        assert np.array_equal(cw.levels, np.full(8, 8, dtype=np.int64))

    def test_ramp(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        g = stepf(1.0, np.arange(8) / 8.0)
        cw = quantize_monotone(g, p)
        assert np.array_equal(cw.levels, np.arange(8, dtype=np.int64))
        err = step_l1(g, dequantize_monotone(cw, p))
        assert err <= 0.25

    def test_rejects_non_monotone(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        with pytest.raises(ClassViolationError):
            quantize_monotone(stepf(1.0, [0.5, 0.2] * 4), p)

    def test_rejects_out_of_range(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        with pytest.raises(ClassViolationError):
            quantize_monotone(stepf(1.0, np.linspace(0, 1.5, 8)), p)

    @pytest.mark.parametrize("seed", range(12))
    def test_net_soundness(self, seed):
        # round trip within eps/2 for arbitrary nondecreasing g into [0, B]
        rng = np.random.default_rng(seed)
        bound = float(rng.uniform(0.5, 3.0))
        eps = float(rng.uniform(0.05, 0.8))
        length = float(rng.uniform(0.5, 2.0))
        k_in = int(rng.integers(1, 40))
        g = stepf(length, np.sort(rng.uniform(0, bound, size=k_in)))
        p = monotone_net_params(length, bound, eps)
        err = step_l1(g, dequantize_monotone(quantize_monotone(g, p), p))
        assert err <= eps / 2 + 1e-12

    def test_dequantize_examples(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        zero = dequantize_monotone(MonotoneCodeword(np.zeros(8, dtype=np.int64)), p)
        assert np.array_equal(zero.values, np.zeros(8))
        ramp = dequantize_monotone(MonotoneCodeword(np.arange(8, dtype=np.int64)), p)
        assert np.allclose(ramp.values, np.arange(8) / 8.0)


class TestNetSizeAndRank:
    def test_size_examples(self):
        assert monotone_net_size(monotone_net_params(1.0, 0.0, 1.0)) == 1
        # oracle enumeration for k=2, m=1: 00, 01, 11
        assert len(enumerate_monotone(2, 1)) == 3
        p = monotone_net_params(1.0, 1.0, 0.5)
        assert monotone_net_size(p) == math.comb(16, 8) == 12870

    @pytest.mark.parametrize("k,m", [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3), (5, 4)])
    def test_rank_is_colex_bijection(self, k, m):
        from bvent.bv1d import MonotoneNetParams

        p = MonotoneNetParams(length=1.0, bound=float(m), eps=1.0, k=k, m=m)
        seqs = enumerate_monotone(k, m)
        # colex: compare the last differing position
        seqs_colex = sorted(seqs, key=lambda s: tuple(reversed(s)))
        ranks = [
            codeword_rank(MonotoneCodeword(np.array(s, dtype=np.int64)), p)
            for s in seqs_colex
        ]
        assert ranks == list(range(len(seqs)))
        for r, s in zip(ranks, seqs_colex):
            got = codeword_unrank(r, p)
            assert tuple(got.levels.tolist()) == s

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_rank_round_trip_random(self, data):
        k = data.draw(st.integers(1, 60))
        m = data.draw(st.integers(0, 60))
        levels = np.sort(
            np.array(
                data.draw(st.lists(st.integers(0, m), min_size=k, max_size=k)),
                dtype=np.int64,
            )
        )
        from bvent.bv1d import MonotoneNetParams

        bound = float(m) if m else 0.0
        p = MonotoneNetParams(length=1.0, bound=bound, eps=1.0, k=k, m=m)
        cw = MonotoneCodeword(levels)
        r = codeword_rank(cw, p)
        assert 0 <= r < monotone_net_size(p)
        back = codeword_unrank(r, p)
        assert np.array_equal(back.levels, levels)

    def test_unrank_rejects_out_of_range(self):
        p = monotone_net_params(1.0, 1.0, 0.5)
        with pytest.raises(ParseError):
            codeword_unrank(monotone_net_size(p), p)
        with pytest.raises(ParseError):
            codeword_unrank(-1, p)

    def test_count_bound(self):
        for k, m in [(8, 8), (60, 60), (137, 91)]:
            size = math.comb(k + m, m)
            assert math.log2(size) <= k + m


class TestBVCode1D:
    def test_zero_round_trip_exact(self):
        f = stepf(1.0, np.zeros(4))
        p = bv_net_params(1.0, 1.0, 1.0, 0.5)
        cw = encode_bv_1d(f, 1.0, 1.0, 0.5)
        g = decode_bv_1d(cw, p)
        assert step_l1(f, g) == 0.0

    def test_single_drop(self):
        f = stepf(1.0, [1.0, 0.0])
        p = bv_net_params(1.0, 1.0, 1.0, 0.5)
        cw = encode_bv_1d(f, 1.0, 1.0, 0.5)
        assert step_l1(f, decode_bv_1d(cw, p)) <= 0.5

    @pytest.mark.parametrize("seed", range(25))
    def test_random_members_at_tenth(self, seed):
        f = random_step(1.0, 32, 1.0, 1.0, seed)
        p = bv_net_params(1.0, 1.0, 1.0, 0.1)
        cw = encode_bv_1d(f, 1.0, 1.0, 0.1)
        assert step_l1(f, decode_bv_1d(cw, p)) <= 0.1

    def test_signed_inputs(self):
        rng = np.random.default_rng(9)
        vals = rng.uniform(-1, 1, size=16)
        tv = float(np.sum(np.abs(np.diff(vals))))
        f = stepf(2.0, vals)
        p = bv_net_params(2.0, 1.0, tv, 0.3)
        cw = encode_bv_1d(f, 1.0, tv, 0.3)
        assert step_l1(f, decode_bv_1d(cw, p)) <= 0.3

    def test_class_violation(self):
        f = stepf(1.0, [0.0, 5.0])
        with pytest.raises(ClassViolationError):
            encode_bv_1d(f, 1.0, 1.0, 0.5)
        with pytest.raises(ClassViolationError):
            encode_bv_1d(stepf(1.0, [0.0, 1.0, 0.0, 1.0]), 1.0, 1.0, 0.5)


class TestEntropyBound1D:
    def test_values(self):
        assert entropy_bound_1d(1.0, 1.0, 1.0, 0.1) == 160
        assert entropy_bound_1d(1.0, 1.0, 1.0, 1.0 / 3.0) == 48

    def test_boundary_excluded(self):
        # threshold L(M+V)/6 = 0.5 is exactly representable here
        with pytest.raises(RangeError):
            entropy_bound_1d(1.0, 1.5, 1.5, 0.5)
        assert entropy_bound_1d(1.0, 1.5, 1.5, 0.49) == 8 * math.floor(3.0 / 0.49)

    def test_nonpositive(self):
        with pytest.raises(RangeError):
            entropy_bound_1d(1.0, 1.0, 1.0, 0.0)


class TestRandomStep:
    def test_deterministic_and_in_class(self):
        a = random_step(1.0, 16, 1.0, 1.0, 5)
        b = random_step(1.0, 16, 1.0, 1.0, 5)
        assert np.array_equal(a.values, b.values)
        assert np.all(a.values >= 0) and np.all(a.values <= 1.0)
        assert step_total_variation(a) <= 1.0
