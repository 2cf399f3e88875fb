"""ECDF machinery, KS statistics against a brute-force oracle, and the
centering/scaling transforms with their plug-in anchor values."""

import math

import numpy as np
import pytest
from oracles import ks_two_sample_brute
from scipy.special import ndtri

from lppsim.errors import ParameterError, ValidationError
from lppsim.stats import (EcdfSummary, KSResult, center_scale_last_passage,
                          center_scale_theorem_form, ecdf_summary,
                          ks_critical_coefficient, ks_one_sample,
                          ks_two_sample, standard_normal_cdf)


class TestEcdf:
    def test_summary_fields(self):
        s = ecdf_summary([3.0, 1.0, 2.0, 2.0])
        assert np.array_equal(s.sample, [1.0, 2.0, 2.0, 3.0])
        assert s.n == 4
        assert s.mean == 2.0
        assert s.variance == pytest.approx(np.var([1, 2, 2, 3], ddof=1))
        assert s.stderr == pytest.approx(math.sqrt(s.variance / 4))

    def test_right_continuous_steps(self):
        s = ecdf_summary([1.0, 2.0, 2.0, 3.0])
        assert s.evaluate(0.5) == 0.0
        assert s.evaluate(1.0) == 0.25
        assert s.evaluate(1.5) == 0.25
        assert s.evaluate(2.0) == 0.75
        assert s.evaluate(3.0) == 1.0
        assert s.evaluate(99.0) == 1.0

    def test_quantile_order_statistics(self):
        s = ecdf_summary([10.0, 20.0, 30.0, 40.0])
        assert s.quantile(0.25) == 10.0
        assert s.quantile(0.26) == 20.0
        assert s.quantile(0.5) == 20.0
        assert s.quantile(1.0) == 40.0
        assert s.quantile(1e-9) == 10.0
        with pytest.raises(ParameterError):
            s.quantile(0.0)
        with pytest.raises(ParameterError):
            s.quantile(1.1)

    def test_single_observation(self):
        s = ecdf_summary([5.0])
        assert s.variance == 0.0
        assert s.stderr == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            ecdf_summary([])
        with pytest.raises(ValidationError):
            ecdf_summary([1.0, np.nan])
        with pytest.raises(ValidationError):
            ecdf_summary([[1.0, 2.0]])


class TestCriticalCoefficient:
    def test_standard_levels(self):
        assert ks_critical_coefficient(0.05) == pytest.approx(1.3581015157406195, abs=1e-15)
        assert ks_critical_coefficient(0.05) == pytest.approx(1.358, abs=5e-4)
        assert ks_critical_coefficient(0.01) == pytest.approx(1.628, abs=5e-4)

    def test_validation(self):
        with pytest.raises(ParameterError):
            ks_critical_coefficient(0.0)
        with pytest.raises(ParameterError):
            ks_critical_coefficient(1.0)


class TestOneSample:
    def test_exact_quantile_sample(self):
        for n in (10, 100, 1000):
            xs = ndtri((np.arange(1, n + 1) - 0.5) / n)
            res = ks_one_sample(xs, standard_normal_cdf)
            assert res.statistic == pytest.approx(1.0 / (2 * n), abs=1e-12)
            assert res.n1 == n and res.n2 is None

    def test_null_sample_accepts(self):
        rng = np.random.default_rng(505)
        xs = rng.standard_normal(10_000)
        res = ks_one_sample(xs, standard_normal_cdf)
        assert res.statistic < 0.0194
        assert res.threshold == pytest.approx(1.3581015157406195 / 100.0)
        assert not res.reject

    def test_constant_sample_rejects(self):
        res = ks_one_sample(np.zeros(100), standard_normal_cdf)
        assert res.statistic >= 0.5
        assert res.reject

    def test_shifted_sample_rejects(self):
        rng = np.random.default_rng(506)
        res = ks_one_sample(rng.standard_normal(2000) + 0.2, standard_normal_cdf)
        assert res.reject

    def test_unsorted_input_allowed(self):
        rng = np.random.default_rng(507)
        xs = rng.standard_normal(500)
        a = ks_one_sample(xs, standard_normal_cdf)
        b = ks_one_sample(np.sort(xs), standard_normal_cdf)
        assert a.statistic == b.statistic

    def test_cdf_range_check(self):
        with pytest.raises(ParameterError):
            ks_one_sample([0.0, 1.0], lambda x: 1.2)
        with pytest.raises(ValidationError):
            ks_one_sample([], standard_normal_cdf)


class TestTwoSample:
    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(508)
        for trial in range(200):
            n1 = int(rng.integers(1, 30))
            n2 = int(rng.integers(1, 30))
            # integer-valued draws force heavy cross-sample ties
            a = rng.integers(0, 6, n1).astype(float)
            b = rng.integers(0, 6, n2).astype(float)
            assert ks_two_sample(a, b).statistic == ks_two_sample_brute(a, b)

    def test_identical_samples(self):
        a = np.array([1.0, 2.0, 3.0])
        res = ks_two_sample(a, a.copy())
        assert res.statistic == 0.0
        assert not res.reject

    def test_disjoint_supports(self):
        res = ks_two_sample([1.0, 2.0], [5.0, 6.0, 7.0])
        assert res.statistic == 1.0
        # the asymptotic threshold exceeds 1 at these tiny sizes, so check
        # the rejection flag on a larger disjoint pair
        big = ks_two_sample(np.arange(10.0), np.arange(100.0, 120.0))
        assert big.statistic == 1.0
        assert big.reject

    def test_symmetry(self):
        rng = np.random.default_rng(509)
        a = rng.standard_normal(40)
        b = rng.standard_normal(60) + 0.3
        x = ks_two_sample(a, b)
        y = ks_two_sample(b, a)
        assert x.statistic == y.statistic
        assert x.threshold == y.threshold
        assert (x.n1, x.n2) == (y.n2, y.n1)

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(510)
        a = rng.standard_normal(50)
        b = rng.standard_normal(70) * 1.3
        base = ks_two_sample(a, b).statistic
        assert ks_two_sample(np.arctan(a), np.arctan(b)).statistic == base
        assert ks_two_sample(np.exp(a), np.exp(b)).statistic == base
        assert ks_two_sample(3.0 * a - 2.0, 3.0 * b - 2.0).statistic == base

    def test_threshold_formula(self):
        res = ks_two_sample(np.zeros(25) + np.arange(25), np.arange(100) * 0.3)
        want = 1.3581015157406195 * math.sqrt((25 + 100) / (25 * 100))
        assert res.threshold == pytest.approx(want, rel=1e-12)

    def test_null_behavior(self):
        rng = np.random.default_rng(511)
        a = rng.standard_normal(4000)
        b = rng.standard_normal(4000)
        res = ks_two_sample(a, b)
        assert not res.reject

    def test_record_round_trip(self):
        res = ks_two_sample([1.0], [2.0])
        rec = res.as_record()
        assert set(rec) == {"statistic", "n1", "n2", "alpha", "threshold", "reject"}
        assert KSResult(**rec) == res

    def test_validation(self):
        with pytest.raises(ValidationError):
            ks_two_sample([], [1.0])
        with pytest.raises(ValidationError):
            ks_two_sample([1.0], [np.inf])


class TestCenterScalePathForm:
    def test_centering_point_maps_to_zero(self):
        mu, sigma, N, k = 1.7, 0.4, 300, 5
        v = mu * (N + k - 1) + 2 * sigma * math.sqrt(N * k)
        assert center_scale_last_passage(v, N, k, mu, sigma) == pytest.approx(0.0, abs=1e-12)
        w = mu * (N + k - 1) - 2 * sigma * math.sqrt(N * k)
        assert center_scale_last_passage(w, N, k, mu, sigma, kind="first") == pytest.approx(
            0.0, abs=1e-12)

    def test_standard_plug_in(self):
        # mu=0, sigma=1, N=4, k=1: (value - 4) / 2
        for v in (-1.0, 0.0, 4.0, 10.0):
            assert center_scale_last_passage(v, 4, 1, 0.0, 1.0) == pytest.approx(
                (v - 4.0) / 2.0, abs=1e-13)

    def test_affine_and_argmax_invariance(self):
        rng = np.random.default_rng(512)
        vals = rng.standard_normal(50) * 10 + 100
        out = center_scale_last_passage(vals, 50, 3, 2.0, 1.5)
        assert out.shape == vals.shape
        assert int(np.argmax(out)) == int(np.argmax(vals))
        # affine in value: equal increments map to equal increments
        d1 = center_scale_last_passage(1.0, 50, 3, 2.0, 1.5) - center_scale_last_passage(
            0.0, 50, 3, 2.0, 1.5)
        d2 = center_scale_last_passage(2.0, 50, 3, 2.0, 1.5) - center_scale_last_passage(
            1.0, 50, 3, 2.0, 1.5)
        assert d1 == pytest.approx(d2, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ParameterError):
            center_scale_last_passage(0.0, 4, 1, 0.0, 0.0)
        with pytest.raises(ParameterError):
            center_scale_last_passage(0.0, 0, 1, 0.0, 1.0)
        with pytest.raises(ParameterError):
            center_scale_last_passage(0.0, 4, 1, 0.0, 1.0, kind="middle")


class TestCenterScaleTheoremForm:
    def test_anchor_values(self):
        N, k = 900, 4
        assert center_scale_theorem_form(2.0 * math.sqrt(N * k), N, k) == pytest.approx(
            0.0, abs=1e-12)
        assert center_scale_theorem_form(-2.0 * math.sqrt(N * k), N, k,
                                         kind="first") == pytest.approx(0.0, abs=1e-12)

    def test_single_row_reduction(self):
        for v in (0.0, 3.0, -7.0):
            assert center_scale_theorem_form(v, 25, 1) == pytest.approx(v / 5.0 - 2.0,
                                                                        abs=1e-13)

    def test_array_transparency(self):
        vals = np.array([0.0, 1.0, 2.0])
        out = center_scale_theorem_form(vals, 16, 2)
        assert out.shape == (3,)
        assert out[0] == pytest.approx((0.0 / 4.0 - 2.0 * math.sqrt(2)) * 2 ** (1 / 6))

    def test_validation(self):
        with pytest.raises(ParameterError):
            center_scale_theorem_form(0.0, 4, 0)
        with pytest.raises(ParameterError):
            center_scale_theorem_form(0.0, 4, 1, kind="sideways")


class TestNormalCdf:
    def test_symmetry_and_anchors(self):
        assert standard_normal_cdf(0.0) == 0.5
        assert standard_normal_cdf(1.96) == pytest.approx(0.975, abs=2e-4)
        for x in (0.3, 1.1, 2.5):
            assert standard_normal_cdf(-x) == pytest.approx(1.0 - standard_normal_cdf(x),
                                                            abs=1e-15)
