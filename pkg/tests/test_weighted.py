import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

from randbetti import HypothesisViolation, ParameterError
from randbetti.sampling import combine, expected_entry, sample_uniform, table_of
from randbetti.weighted import (
    H_integral,
    WeightFunction,
    check_nonvanishing,
    log_weighted_expected,
    weighted_expected_k_p1,
    weighted_gaussian_experiment,
    weighted_riemann_ratio,
    weighted_sample,
)

ONE = WeightFunction.constant(1)
ZERO = WeightFunction.constant(0)
SIN2 = WeightFunction.sin2(0.35)
LEFT_HALF = WeightFunction.table([0, "1/2", 1], [1, 0, 0])
TENT = WeightFunction.table([0, "1/3", 1], ["1/4", 1, "1/2"])


class TestWeightFunction:
    def test_presets(self):
        assert ONE(F(1, 3)) == 1 and ONE.is_exact
        assert not WeightFunction.constant(0.5).is_exact
        assert SIN2(0.35) == pytest.approx(0, abs=1e-15)
        assert SIN2(0.35 + 0.25) == pytest.approx(1)

    def test_table_interpolation(self):
        assert TENT(F(1, 6)) == F(5, 8)
        assert TENT(F(2, 3)) == F(3, 4)
        assert TENT(0.5) == pytest.approx(0.875)
        assert TENT.knots == (0.0, 1 / 3, 1.0)

    def test_range_checks(self):
        with pytest.raises(ParameterError):
            WeightFunction.constant(2)
        with pytest.raises(ParameterError):
            WeightFunction.table([0, 1], [0, "3/2"])
        with pytest.raises(ParameterError):
            WeightFunction.table([0, "1/2", "1/2"], [0, 0, 0])
        with pytest.raises(ParameterError):
            WeightFunction("cubic", ())

    def test_csv(self):
        h = WeightFunction.from_csv("t,h\n0,1/4\n1/3,1\n1,1/2\n")
        assert h == TENT
        assert WeightFunction.from_csv("0,0.5\n1,0.25\n")(0.5) == pytest.approx(0.375)

    def test_json(self):
        assert SIN2.to_json_dict() == {"kind": "sin2", "param": "0.35"}
        assert TENT.to_json_dict()["h"] == ["1/4", "1", "1/2"]


class TestSampling:
    def test_zero_weight(self):
        assert not np.any(weighted_sample(50, ZERO, 1).values)

    def test_unit_weight_same_law(self):
        draws = [weighted_sample(20, ONE, 9, stream=s).values[6] for s in range(10**4)]
        assert stats.kstest(draws, "uniform").pvalue > 0.01
        assert np.array_equal(weighted_sample(20, ONE, 9).values, sample_uniform(20, 2, 9).values)

    def test_zero_of_sin2(self):
        assert weighted_sample(500, SIN2, 4).values[174] == pytest.approx(0, abs=1e-15)

    def test_only_two_rows(self):
        with pytest.raises(ParameterError):
            weighted_sample(20, ONE, 0, n=3)

    def test_vanishing_past_half(self):
        r = 100
        for seed in range(20):
            t = table_of(weighted_sample(r, LEFT_HALF, seed))
            assert all(t.entry(p, 1) == 0 for p in range(r // 2 + 1, r - 1))


class TestHIntegral:
    @pytest.mark.parametrize("r, p", [(10, 3), (100, 50), (2000, 1000)])
    def test_constant(self, r, p):
        assert H_integral(r, p, ONE) == pytest.approx((1 - (p + 1) / r) / 4, rel=1e-12)

    def test_zero_and_support(self):
        assert H_integral(100, 50, ZERO) == 0
        assert H_integral(100, 50, LEFT_HALF) == 0

    def test_degenerate(self):
        with pytest.raises(ParameterError):
            H_integral(10, 9, ONE)
        with pytest.raises(ParameterError):
            H_integral(10, 3, ONE, q=3)

    def test_mirror(self):
        assert H_integral(100, 49, ONE, q=2) == pytest.approx(0.5 / 4, rel=1e-12)


class TestExpected:
    def test_unit_weight_reduces_exactly(self):
        for r in range(3, 41):
            for p in range(r - 1):
                assert weighted_expected_k_p1(r, p, ONE) == expected_entry(r, 2, p, 1)
                assert weighted_expected_k_p1(r, p, ONE, q=2) == expected_entry(r, 2, p, 2)

    @pytest.mark.parametrize("h", [TENT, LEFT_HALF, WeightFunction.constant("1/3")])
    def test_matches_half_weighted_sum(self, h):
        for r in (7, 12, 19):
            table = combine(r, 2, [h.exact(F(i, r)) / 2 for i in range(1, r + 1)])
            for p in range(r - 1):
                assert weighted_expected_k_p1(r, p, h) == table.entry(p, 1)
                assert weighted_expected_k_p1(r, p, h, q=2) == table.entry(p, 2)

    def test_zero(self):
        assert weighted_expected_k_p1(30, 10, ZERO) == 0

    def test_float_path(self):
        h = WeightFunction.constant(0.5)
        assert weighted_expected_k_p1(30, 10, h) == pytest.approx(float(expected_entry(30, 2, 10, 1)) / 2)
        assert weighted_expected_k_p1(3000, 1500, SIN2) == math.inf
        assert math.isfinite(log_weighted_expected(3000, 1500, SIN2))

    def test_dominance(self):
        low = WeightFunction.constant("1/4")
        for r in (15, 40):
            for p in range(r - 1):
                for q in (1, 2):
                    assert weighted_expected_k_p1(r, p, low, q) <= weighted_expected_k_p1(r, p, TENT, q)

    # max over r in [100, 4000] of |ratio - 1| * r at p = r // 2
    RIEMANN_K = [(ONE, 2.05), (SIN2, 4.0)]

    @pytest.mark.parametrize("h, K", RIEMANN_K)
    def test_riemann_rate(self, h, K):
        for r in range(100, 4001, 37):
            assert abs(weighted_riemann_ratio(r, r // 2, h) - 1) * r <= K


class TestExperiment:
    def test_unit_weight_expected(self):
        for a in (0, 1):
            rep = weighted_gaussian_experiment(ONE, [500, 2000], a, source="expected")
            assert rep.passed

    def test_unit_weight_sampled(self):
        rep = weighted_gaussian_experiment(ONE, [2000], 1, seed=0, N=400)
        assert rep.passed and rep.seed == 0
        assert rep.per_r[0]["sample_std"] > 0

    def test_sin2_center(self):
        rep = weighted_gaussian_experiment(SIN2, [500, 2000], 0, source="expected")
        assert rep.per_r[-1]["rel_error"] < 0.01

    def test_refuses_left_supported(self):
        with pytest.raises(HypothesisViolation) as info:
            weighted_gaussian_experiment(LEFT_HALF, [100], 0)
        assert info.value.exit_code == 5

    def test_refuses_non_smooth(self):
        with pytest.raises(HypothesisViolation):
            check_nonvanishing(TENT)

    def test_second_row(self):
        rep = weighted_gaussian_experiment(ONE, [2000], 0, q=2, source="expected")
        assert rep.per_r[0]["rel_error"] < 0.01
        with pytest.raises(HypothesisViolation):
            check_nonvanishing(WeightFunction.table([0, "1/2", 1], [0, 0, 1]), q=2)
