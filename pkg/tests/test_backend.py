import os
import subprocess
import sys

import numpy as np
import pytest

from kpls import _core_fallback, backend


def both_backends():
    impls = [("numpy", _core_fallback)]
    try:
        from kpls import _core

        impls.append(("compiled", _core))
    except ImportError:
        pass
    return impls


@pytest.mark.parametrize("name,impl", both_backends())
class TestBackendContracts:
    def test_rbf_gram_structure(self, name, impl):
        rng = np.random.default_rng(0)
        X = np.ascontiguousarray(rng.standard_normal((17, 3)))
        K = impl.rbf_gram(X, 0.8)
        assert np.array_equal(K, K.T)
        assert np.all(np.diag(K) == 1.0)
        assert K.min() >= 0.0 and K.max() <= 1.0

    def test_linear_gram_structure(self, name, impl):
        rng = np.random.default_rng(1)
        X = np.ascontiguousarray(rng.standard_normal((11, 4)))
        K = impl.linear_gram(X)
        assert np.array_equal(K, K.T)
        assert np.abs(K - X @ X.T).max() <= 1e-12 * np.abs(K).max()

    def test_deflate_matches_projector_form(self, name, impl):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((9, 9))
        K = np.ascontiguousarray(A @ A.T)
        t = rng.standard_normal(9)
        t /= np.linalg.norm(t)
        u = K @ t
        expect = (np.eye(9) - np.outer(t, t)) @ K @ (np.eye(9) - np.outer(t, t))
        work = K.copy()
        impl.deflate_inplace(work, t, u, float(t @ u))
        assert np.abs(work - expect).max() <= 1e-12 * np.abs(K).max()
        assert np.array_equal(work, work.T)

    def test_center_matches_double_projection(self, name, impl):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((8, 8))
        K = np.ascontiguousarray(A @ A.T)
        n = 8
        J = np.eye(n) - np.ones((n, n)) / n
        expect = J @ K @ J
        work = K.copy()
        col_means, grand = impl.center_inplace(work)
        assert np.abs(work - expect).max() <= 1e-12 * np.abs(K).max()
        assert np.allclose(col_means, K.mean(axis=0))
        assert grand == pytest.approx(K.mean())
        assert np.array_equal(work, work.T)


def test_backends_agree():
    impls = both_backends()
    if len(impls) < 2:
        pytest.skip("compiled core not built")
    rng = np.random.default_rng(4)
    X = np.ascontiguousarray(rng.standard_normal((23, 2)))
    K_np = impls[0][1].rbf_gram(X, 0.6)
    K_cy = impls[1][1].rbf_gram(X, 0.6)
    assert np.abs(K_np - K_cy).max() <= 1e-12


def test_env_override_selects_numpy():
    env = dict(os.environ)
    env["KPLS_BACKEND"] = "numpy"
    proc = subprocess.run(
        [sys.executable, "-c", "import kpls; print(kpls.BACKEND_NAME)"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numpy"


def test_reported_backend_is_consistent():
    assert backend.NAME in ("compiled", "numpy")
    assert backend.IS_COMPILED == (backend.NAME == "compiled")
