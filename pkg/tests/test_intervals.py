import numpy as np
import pytest

import kpls
from kpls.errors import CannotEstimateSigmaError, InvalidInputError
from kpls.intervals import (
    build_sensitivity_cache,
    confidence_band,
    estimate_sigma,
    h_transpose_k,
    predictive_stderr,
)
from kpls.linalg import solve_upper
from kpls.nipals import fit
from kpls.sensitivity import jacobian_fd

from conftest import random_rbf_problem


def cache_for(pipe, m):
    return build_sensitivity_cache(pipe.K, pipe.y_centered, pipe.model, m)


class TestHTransposeK:
    def test_zero_column_maps_to_zero(self):
        pipe = random_rbf_problem(seed=0, n=20, m_max=3)
        cache = cache_for(pipe, 3)
        out = h_transpose_k(cache, pipe.K, np.zeros(20))
        assert np.abs(out).max() == 0.0

    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_matches_fd_jacobian_of_coefficients(self, m):
        pipe = random_rbf_problem(seed=7, n=25, m_max=4)
        y_c = pipe.y_centered
        m = min(m, pipe.model.actual_m)
        Ja = jacobian_fd(pipe.K, y_c, m, of_alpha=True)
        cache = cache_for(pipe, m)
        rng = np.random.default_rng(99)
        for _ in range(10):
            kx = pipe.query_column(rng.standard_normal(2))
            got = h_transpose_k(cache, pipe.K, kx)
            ref = Ja.T @ kx
            assert np.linalg.norm(got - ref) <= 1e-3 * np.linalg.norm(ref)

    def test_u_factor_identity(self):
        # U B' must reproduce R L^{-1}: the exact coupling, not a diagonal
        # approximation of the bidiagonal factor
        pipe = random_rbf_problem(seed=8, n=25, m_max=4)
        m = pipe.model.actual_m
        cache = cache_for(pipe, m)
        R, L = cache.R, cache.L
        mom = kpls.krylov_moments(pipe.K, pipe.y_centered, pipe.model, m)
        rl_inv = np.column_stack(
            [R @ solve_upper(L, np.eye(m)[:, j]) for j in range(m)]
        )
        recon = cache.U @ mom.B.T
        assert np.abs(recon - rl_inv).max() <= 1e-8 * max(1.0, np.abs(rl_inv).max())

    def test_dimension_mismatch(self):
        pipe = random_rbf_problem(seed=9, n=15, m_max=2)
        cache = cache_for(pipe, 2)
        with pytest.raises(InvalidInputError):
            h_transpose_k(cache, pipe.K, np.zeros(14))


class TestPredictiveStderr:
    def test_zero_column(self):
        pipe = random_rbf_problem(seed=10, n=18, m_max=3)
        cache = cache_for(pipe, 3)
        assert predictive_stderr(cache, pipe.K, np.zeros(18), 1.0) == 0.0

    def test_linear_in_sigma(self):
        pipe = random_rbf_problem(seed=11, n=18, m_max=3)
        cache = cache_for(pipe, 3)
        kx = pipe.query_column(np.array([0.5, -0.5]))
        one = predictive_stderr(cache, pipe.K, kx, 1.0)
        two = predictive_stderr(cache, pipe.K, kx, 2.0)
        assert two == pytest.approx(2.0 * one, rel=1e-15)

    def test_matches_fd_norm(self):
        pipe = random_rbf_problem(seed=12, n=25, m_max=3)
        y_c = pipe.y_centered
        m = min(3, pipe.model.actual_m)
        Ja = jacobian_fd(pipe.K, y_c, m, of_alpha=True)
        cache = cache_for(pipe, m)
        kx = pipe.query_column(np.array([0.2, 0.4]))
        se = predictive_stderr(cache, pipe.K, kx, 0.7)
        ref = 0.7 * np.linalg.norm(Ja.T @ kx)
        assert se == pytest.approx(ref, rel=1e-3)

    def test_sigma_must_be_positive(self):
        pipe = random_rbf_problem(seed=13, n=15, m_max=2)
        cache = cache_for(pipe, 2)
        with pytest.raises(InvalidInputError):
            predictive_stderr(cache, pipe.K, np.zeros(15), 0.0)


class TestConfidenceBand:
    def test_band_ordering(self):
        pipe = random_rbf_problem(seed=14, n=30, m_max=4)
        band = pipe.band(np.linspace(-2, 2, 15)[:, None].repeat(2, axis=1),
                         m=3, level=0.9, sigma=0.5)
        assert np.all(band.lower <= band.prediction)
        assert np.all(band.prediction <= band.upper)

    def test_width_is_twice_z_stderr(self):
        pipe = random_rbf_problem(seed=15, n=25, m_max=3)
        grid = np.column_stack([np.linspace(-1, 1, 9), np.linspace(-1, 1, 9)])
        band = pipe.band(grid, m=2, level=0.98, sigma=1.0)
        z = kpls.normal_quantile(0.99)
        widths = band.upper - band.lower
        assert np.abs(widths - 2.0 * z * band.stderr).max() <= 1e-10

    def test_far_query_collapses_without_centering(self):
        rng = np.random.default_rng(16)
        X = rng.uniform(-2, 2, size=(20, 1))
        y = np.sin(X[:, 0]) + 0.1 * rng.standard_normal(20)
        ds = kpls.Dataset(X=X, y=y)
        pipe = kpls.fit_kpls(ds, kpls.KernelSpec("rbf", 0.3), m_max=3,
                             center_data=False)
        band = pipe.band(np.array([[50.0]]), m=3, level=0.98, sigma=1.0)
        assert abs(band.prediction[0] - pipe.model.y_mean) <= 1e-10
        assert band.stderr[0] <= 1e-10

    def test_level_validated(self):
        pipe = random_rbf_problem(seed=17, n=15, m_max=2)
        with pytest.raises(InvalidInputError):
            pipe.band(np.zeros((3, 2)), m=2, level=1.0, sigma=1.0)

    def test_grid_dimension_validated(self):
        pipe = random_rbf_problem(seed=18, n=15, m_max=2)
        with pytest.raises(InvalidInputError):
            confidence_band(
                pipe.model, pipe.K, pipe.dataset.X, pipe.y_centered,
                np.zeros((3, 5)), 2, 0.9, 1.0,
            )

    def test_sigma_estimated_when_absent(self):
        ds = kpls.synth_sinc(60, 0.1, seed=3)
        pipe = kpls.fit_kpls(ds, kpls.KernelSpec("rbf", 1.0), m_max=5)
        band = pipe.band(np.linspace(-3, 3, 5), m=4, level=0.95)
        assert band.sigma > 0


class TestEstimateSigma:
    def test_saturated_fit_rejected(self):
        # exact DoF of the identity-kernel fit is n; the approximate DoF
        # only sees the one reachable Ritz value, so the exact variant is
        # the one that must refuse
        rng = np.random.default_rng(19)
        y = rng.standard_normal(10)
        model = fit(np.eye(10), y, 1)
        with pytest.raises(CannotEstimateSigmaError):
            estimate_sigma(np.eye(10), y, model, 1, use_approx_dof=False)

    def test_interpolating_fit_rejected(self):
        rng = np.random.default_rng(20)
        y = rng.standard_normal(10)
        model = fit(np.eye(10), y, 1)
        with pytest.raises(CannotEstimateSigmaError):
            estimate_sigma(np.eye(10), y, model, 1, use_approx_dof=True)

    def test_recovers_noise_scale(self):
        ds = kpls.synth_sinc(100, 0.1, seed=5)
        pipe = kpls.fit_kpls(ds, kpls.KernelSpec("rbf", 1.0), m_max=6)
        sigma = estimate_sigma(pipe.K, pipe.y_centered, pipe.model, 6)
        assert 0.05 <= sigma <= 0.2
