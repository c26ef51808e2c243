import math

import numpy as np
import pytest

from randbetti import ParameterError
from randbetti.asymptotics import (
    GaussianSequenceSpec,
    SampledSource,
    binomial_gaussian_ratio,
    gaussian_experiment,
    gaussian_grid,
    log_binomial,
    log_fraction,
    log_stirling_normalizer,
    p_of,
    round_half_away,
    stirling_normalizer,
)
from randbetti.sampling import expected_entry


def test_round_half_away():
    assert [round_half_away(x) for x in (0.5, 1.5, 2.5, -0.5, -1.5, 2.49)] == [1, 2, 3, -1, -2, 2]


def test_p_of():
    assert p_of(2000, 0) == 1000
    assert p_of(2000, 1) == round_half_away(1000 + math.sqrt(2000) / 2)
    assert p_of(100, -1) == 45
    with pytest.raises(ParameterError):
        p_of(16, 5)


def test_normalizer_matches_direct_formula():
    for r, n, q in [(40, 2, 1), (60, 3, 2), (100, 4, 3)]:
        direct = (math.factorial(q - 1) * math.factorial(n - q) * math.sqrt(2 * math.pi * r)
                  / (2 ** (r + 2 - 3 * n) * r ** (n - 1)))
        assert stirling_normalizer(r, n, q) == pytest.approx(direct, rel=1e-12)


def test_normalizer_underflow_is_harmless_in_logs():
    assert stirling_normalizer(5000, 2, 1) == 0.0
    assert math.isfinite(log_stirling_normalizer(5000, 2, 1))


def test_log_helpers():
    assert log_binomial(10, 3) == pytest.approx(math.log(120))
    assert log_binomial(10, 11) == -math.inf
    big = math.comb(3000, 1500)
    assert log_fraction(big) == pytest.approx(log_binomial(3000, 1500), rel=1e-12)


class TestBinomialRatio:
    def test_center(self):
        assert 0.999 <= binomial_gaussian_ratio(10**4, 5000) <= 1.001

    def test_shifted(self):
        r = 10**4
        assert binomial_gaussian_ratio(r, p_of(r, 1)) == pytest.approx(math.exp(-0.5), rel=0.01)

    def test_converges(self):
        errs = [abs(binomial_gaussian_ratio(r, r // 2) - 1) for r in (100, 1000, 10000)]
        assert errs[0] > errs[1] > errs[2]


class TestGaussianExperiment:
    def test_report_shape(self):
        rep = gaussian_experiment(GaussianSequenceSpec(0, (100, 200)))
        assert [row["r"] for row in rep.per_r] == [100, 200]
        assert rep.per_r[0]["target"] == 1.0
        data = rep.to_json_dict()
        assert data["kind"] == "gauss" and data["spec"]["source"] == "expected"
        assert data["passed"] is rep.passed

    def test_sequence_validation(self):
        with pytest.raises(ParameterError):
            GaussianSequenceSpec(0, (200, 100))
        with pytest.raises(ParameterError):
            GaussianSequenceSpec(0, ())
        with pytest.raises(ParameterError):
            GaussianSequenceSpec(0, (100,), n=2, q=3)

    def test_center_error_decreases(self):
        rep = gaussian_experiment(GaussianSequenceSpec(0, (200, 500, 1000, 2000, 4000, 8000)))
        errs = [row["abs_error"] for row in rep.per_r]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    @pytest.mark.parametrize("a", [1, 2, -1])
    def test_off_center_error_decreases_on_geometric_grid(self, a):
        # rounding p_r makes neighbouring r jitter; on a x4 grid the decay dominates
        rep = gaussian_experiment(GaussianSequenceSpec(a, (250, 1000, 4000, 16000)))
        errs = [row["abs_error"] for row in rep.per_r]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_asymmetry_shrinks_like_inverse_sqrt(self):
        # value(-1) - value(1) ~ 3.639 / sqrt(r)
        for r in (500, 2000, 8000):
            lo, hi = (gaussian_experiment(GaussianSequenceSpec(a, (r,))).per_r[0]["value"] for a in (1, -1))
            assert (hi - lo) * math.sqrt(r) == pytest.approx(3.639, abs=0.01)

    def test_sampled_source(self):
        spec = GaussianSequenceSpec(0, (400,))
        rep = gaussian_experiment(spec, SampledSource(seed=3, samples=20))
        assert rep.seed == 3 and rep.spec["source"] == "sampled"
        row = rep.per_r[0]
        assert row["sample_std"] > 0
        assert row["rel_error"] < 0.02
        again = gaussian_experiment(spec, SampledSource(seed=3, samples=20))
        assert again.per_r == rep.per_r

    def test_callable_source(self):
        def source(r, n, p, q):
            return log_fraction(expected_entry(r, n, p, q))

        spec = GaussianSequenceSpec(1, (300, 600))
        assert gaussian_experiment(spec, source).values() == gaussian_experiment(spec).values()
        zero = gaussian_experiment(spec, lambda *args: -math.inf)
        assert zero.values() == [0.0, 0.0] and not zero.passed

    def test_other_rows(self):
        rep = gaussian_experiment(GaussianSequenceSpec(0, (1000, 4000), n=3, q=2))
        assert rep.per_r[-1]["rel_error"] < 0.01

    def test_unknown_source(self):
        with pytest.raises(ParameterError):
            gaussian_experiment(GaussianSequenceSpec(0, (100,)), "nope")

    def test_grid(self):
        reps = gaussian_grid([0, 1], [500, 1000])
        assert [rep.spec["a"] for rep in reps] == [0, 1]
        assert np.isfinite([v for rep in reps for v in rep.values()]).all()
