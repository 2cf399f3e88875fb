"""Tridiagonal edge sampler against dense-matrix oracles and the
from-scratch bisection eigensolver against a library tridiagonal solver."""

import numpy as np
import pytest
from oracles import (gue_two_by_two_mean_max, sample_dense_gue,
                     tridiagonal_eigenvalues_reference)

from lppsim.errors import ValidationError
from lppsim.rmt import (EigenSample, TridiagonalMatrix, extreme_eigenvalues,
                        sample_extremes, sample_gue_tridiagonal,
                        scaled_edge_sample)
from lppsim.stats import ks_one_sample, ks_two_sample, standard_normal_cdf
from lppsim.weights import RngStream


class TestBisectionSolver:
    def random_tridiagonal(self, rng, k):
        return TridiagonalMatrix(rng.standard_normal(k) * 3.0,
                                 np.abs(rng.standard_normal(max(k - 1, 0))) * 2.0)

    def test_extremes_match_reference(self):
        rng = np.random.default_rng(21)
        for trial in range(50):
            k = int(rng.integers(1, 40))
            t = self.random_tridiagonal(rng, k)
            ref = tridiagonal_eigenvalues_reference(t.diagonal, t.off_diagonal)
            got = extreme_eigenvalues(t)
            assert abs(got.lambda_min - ref[0]) < 1e-9
            assert abs(got.lambda_max - ref[-1]) < 1e-9

    def test_full_spectrum_matches_reference(self):
        rng = np.random.default_rng(22)
        for trial in range(15):
            k = int(rng.integers(2, 15))
            t = self.random_tridiagonal(rng, k)
            ref = tridiagonal_eigenvalues_reference(t.diagonal, t.off_diagonal)
            got = extreme_eigenvalues(t, full_spectrum=True)
            assert got.spectrum.shape == (k,)
            assert np.all(np.diff(got.spectrum) >= -1e-12)
            assert np.max(np.abs(got.spectrum - ref)) < 1e-9

    def test_handles_clustered_and_zero_coupling(self):
        # decoupled blocks: exact eigenvalues are the diagonal entries
        t = TridiagonalMatrix(np.array([3.0, -1.0, 2.0]), np.array([0.0, 0.0]))
        got = extreme_eigenvalues(t, full_spectrum=True)
        assert abs(got.lambda_max - 3.0) < 1e-9
        assert abs(got.lambda_min + 1.0) < 1e-9
        assert np.allclose(got.spectrum, [-1.0, 2.0, 3.0], atol=1e-9)
        # near-degenerate pair
        t2 = TridiagonalMatrix(np.array([1.0, 1.0]), np.array([1e-14]))
        got2 = extreme_eigenvalues(t2)
        assert abs(got2.lambda_max - 1.0) < 1e-9
        assert abs(got2.lambda_min - 1.0) < 1e-9

    def test_known_two_by_two(self):
        # eigenvalues of [[0, 1], [1, 0]] are -1 and 1
        t = TridiagonalMatrix(np.zeros(2), np.ones(1))
        got = extreme_eigenvalues(t)
        assert abs(got.lambda_max - 1.0) < 1e-9
        assert abs(got.lambda_min + 1.0) < 1e-9


class TestTridiagonalModel:
    def test_one_dimensional_reduction_is_standard_normal(self):
        stream = RngStream(31, 0)
        draws = sample_extremes(1, 4000, stream)
        assert np.array_equal(draws[:, 0], draws[:, 1])
        res = ks_one_sample(draws[:, 1], standard_normal_cdf)
        assert not res.reject, res.statistic

    def test_off_diagonal_second_moments(self):
        # squared coupling m positions above the bottom has mean m
        k = 6
        acc = np.zeros(k - 1)
        n = 4000
        stream = RngStream(32, 0)
        for _ in range(n):
            acc += sample_gue_tridiagonal(k, stream).off_diagonal ** 2
        means = acc / n
        expected = np.arange(k - 1, 0, -1, dtype=float)
        assert np.max(np.abs(means - expected) / expected) < 0.1

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_spectrum_edge_matches_dense_sampler(self, k):
        n = 4000
        stream = RngStream(33, k)
        tri = sample_extremes(k, n, stream)
        rng = np.random.default_rng(4400 + k)
        dense = np.array([sample_dense_gue(k, rng) for _ in range(n)])
        top = ks_two_sample(tri[:, 1], dense[:, -1])
        bottom = ks_two_sample(tri[:, 0], dense[:, 0])
        assert top.statistic < 0.03, top.statistic
        assert bottom.statistic < 0.03, bottom.statistic

    def test_two_by_two_edge_mean_matches_quadrature(self):
        stream = RngStream(34, 0)
        draws = sample_extremes(2, 40_000, stream)
        target = gue_two_by_two_mean_max()
        assert abs(draws[:, 1].mean() - target) < 0.02
        # the density is symmetric, so the bottom edge mirrors the top
        assert abs(draws[:, 0].mean() + target) < 0.02

    def test_reflection_symmetry_of_edges(self):
        k = 3
        a = sample_extremes(k, 3000, RngStream(35, 1))
        b = sample_extremes(k, 3000, RngStream(35, 2))
        res = ks_two_sample(-a[:, 0], b[:, 1])
        assert res.statistic < 0.04, res.statistic


class TestSampleComposition:
    def test_first_draw_independent_of_batch_size(self):
        k = 7
        single = sample_extremes(k, 1, RngStream(40, 5))
        batch = sample_extremes(k, 64, RngStream(40, 5))
        assert np.array_equal(single[0], batch[0])

    def test_batch_row_equals_single_matrix_solve(self):
        k = 9
        batch = sample_extremes(k, 3, RngStream(41, 2))
        t = sample_gue_tridiagonal(k, RngStream(41, 2))
        alone = extreme_eigenvalues(t)
        assert batch[0, 0] == alone.lambda_min
        assert batch[0, 1] == alone.lambda_max

    def test_scaled_edge_is_affine_map_of_raw_edge(self):
        k = 5
        raw = sample_extremes(k, 200, RngStream(42, 3))
        scaled = scaled_edge_sample(k, 200, RngStream(42, 3))
        assert np.array_equal(scaled, (raw[:, 1] - 2.0 * np.sqrt(k)) * k ** (1.0 / 6.0))

    def test_streams_reproduce_and_separate(self):
        a = scaled_edge_sample(4, 50, RngStream(43, 0))
        b = scaled_edge_sample(4, 50, RngStream(43, 0))
        c = scaled_edge_sample(4, 50, RngStream(43, 1))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestValidation:
    def test_shape_checks(self):
        with pytest.raises(ValidationError):
            TridiagonalMatrix(np.empty(0), np.empty(0))
        with pytest.raises(ValidationError):
            TridiagonalMatrix(np.zeros(3), np.zeros(3))
        with pytest.raises(ValidationError):
            TridiagonalMatrix(np.zeros(3), np.array([1.0, -0.5]))

    def test_parameter_checks(self):
        with pytest.raises(ValidationError):
            sample_gue_tridiagonal(0, RngStream(0, 0))
        with pytest.raises(ValidationError):
            sample_extremes(3, 0, RngStream(0, 0))

    def test_eigen_sample_record(self):
        t = sample_gue_tridiagonal(4, RngStream(1, 1))
        got = extreme_eigenvalues(t)
        assert isinstance(got, EigenSample)
        assert got.k == 4
        assert got.lambda_min <= got.lambda_max
        assert got.spectrum is None
