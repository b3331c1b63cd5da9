import numpy as np
import pytest

from kpls.errors import InvalidInputError, SingularMatrixError
from kpls.linalg import (
    SymTridiagonal,
    matvec,
    normal_quantile,
    solve_upper,
    symtri_eigenvalues,
    trace_powers,
)


class TestSymTridiagonal:
    def test_diagonal_matrix(self):
        tri = SymTridiagonal(diag=[5.0, 2.0, 7.0], offdiag=[0.0, 0.0])
        assert np.allclose(symtri_eigenvalues(tri), [7.0, 5.0, 2.0])

    def test_two_by_two(self):
        tri = SymTridiagonal(diag=[2.0, 2.0], offdiag=[1.0])
        assert np.allclose(symtri_eigenvalues(tri), [3.0, 1.0])

    def test_single_entry(self):
        assert symtri_eigenvalues(SymTridiagonal([4.5], [])) == [4.5]

    @pytest.mark.parametrize("seed", range(20))
    def test_against_dense_eigensolver(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.integers(2, 12)
        tri = SymTridiagonal(rng.standard_normal(m), rng.standard_normal(m - 1))
        mine = symtri_eigenvalues(tri)
        dense = np.sort(np.linalg.eigvalsh(tri.to_dense()))[::-1]
        assert np.abs(mine - dense).max() < 1e-10
        assert np.all(np.diff(mine) <= 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_trace_preserved(self, seed):
        rng = np.random.default_rng(100 + seed)
        m = 8
        tri = SymTridiagonal(rng.standard_normal(m), rng.standard_normal(m - 1))
        eigs = symtri_eigenvalues(tri)
        scale = max(1.0, abs(tri.diag.sum()))
        assert abs(eigs.sum() - tri.diag.sum()) <= 1e-10 * scale

    def test_nonfinite_rejected(self):
        tri = SymTridiagonal([1.0, np.nan], [0.5])
        with pytest.raises(InvalidInputError):
            symtri_eigenvalues(tri)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            SymTridiagonal([1.0, 2.0], [0.5, 0.5])


class TestSolveUpper:
    def test_identity(self):
        assert np.allclose(solve_upper(np.eye(3), [1.0, 2.0, 3.0]), [1, 2, 3])

    def test_hand_back_substitution(self):
        U = np.array([[2.0, 1.0], [0.0, 4.0]])
        assert np.allclose(solve_upper(U, [4.0, 8.0]), [1.0, 2.0])

    @pytest.mark.parametrize("seed", range(10))
    def test_residual_small(self, seed):
        rng = np.random.default_rng(seed)
        U = np.triu(rng.standard_normal((10, 10)))
        U[np.diag_indices(10)] = 1.0 + rng.uniform(0.5, 2.0, 10)
        b = rng.standard_normal(10)
        x = solve_upper(U, b)
        assert np.linalg.norm(U @ x - b) / np.linalg.norm(b) <= 1e-12

    def test_transpose_variant(self):
        rng = np.random.default_rng(5)
        U = np.triu(rng.standard_normal((6, 6)))
        U[np.diag_indices(6)] = 2.0
        b = rng.standard_normal(6)
        x = solve_upper(U, b, transpose=True)
        assert np.linalg.norm(U.T @ x - b) <= 1e-12 * np.linalg.norm(b)

    def test_multiply_back_moderate_conditioning(self):
        rng = np.random.default_rng(11)
        _, R = np.linalg.qr(rng.standard_normal((12, 12)))
        scale = np.sqrt(np.logspace(0, -3, 12))
        U = scale[:, None] * R * scale[None, :]
        assert np.linalg.cond(U) <= 1e8
        b = rng.standard_normal(12)
        x = solve_upper(U, b)
        assert np.linalg.norm(U @ x - b) / np.linalg.norm(b) <= 1e-10

    def test_singular_diagonal_reports_index(self):
        U = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        with pytest.raises(SingularMatrixError) as excinfo:
            solve_upper(U, np.ones(3))
        assert excinfo.value.index == 1

    def test_rejects_lower_entries(self):
        U = np.array([[1.0, 0.0], [0.5, 1.0]])
        with pytest.raises(InvalidInputError):
            solve_upper(U, np.ones(2))


class TestMatvec:
    def test_identity(self):
        assert np.allclose(matvec(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_hand_product(self):
        assert np.allclose(matvec(np.array([[1.0, 2.0], [3.0, 4.0]]), [1, 1]), [3, 7])

    def test_against_naive_loop(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((20, 20))
        x = rng.standard_normal(20)
        naive = np.array([sum(A[i, j] * x[j] for j in range(20)) for i in range(20)])
        got = matvec(A, x)
        assert np.abs(got - naive).max() <= 1e-14 * np.abs(naive).max()

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            matvec(np.eye(3), np.ones(2))


class TestTracePowers:
    def test_identity_eigenvalues(self):
        assert trace_powers(np.ones(3), 5) == 3.0

    def test_hand_value(self):
        assert trace_powers(np.array([2.0, 3.0]), 2) == 13.0

    def test_against_explicit_matrix_power(self):
        rng = np.random.default_rng(9)
        A = rng.standard_normal((6, 6))
        A = A @ A.T
        eigs = np.linalg.eigvalsh(A)
        cubed = A @ A @ A
        expect = np.trace(cubed)
        assert abs(trace_powers(eigs, 3) - expect) <= 1e-9 * abs(expect)

    def test_first_power_is_trace(self):
        rng = np.random.default_rng(13)
        A = rng.standard_normal((5, 5))
        A = A + A.T
        eigs = np.linalg.eigvalsh(A)
        assert abs(trace_powers(eigs, 1) - np.trace(A)) <= 1e-12 * abs(np.trace(A))

    def test_zero_power_rejected(self):
        with pytest.raises(InvalidInputError):
            trace_powers(np.ones(3), 0)


class TestNormalQuantile:
    def test_level_98(self):
        assert abs(normal_quantile(0.99) - 2.3263478740) < 1e-8

    def test_symmetry(self):
        for p in (0.01, 0.2, 0.4):
            assert abs(normal_quantile(p) + normal_quantile(1 - p)) < 1e-12

    def test_against_scipy(self):
        stats = pytest.importorskip("scipy.stats")
        for p in (1e-6, 0.001, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-6):
            assert abs(normal_quantile(p) - stats.norm.ppf(p)) < 1e-8

    def test_domain(self):
        for p in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(InvalidInputError):
                normal_quantile(p)
