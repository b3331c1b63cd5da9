import numpy as np
import pytest

import kpls


def random_rbf_problem(seed, n=30, d=2, width=1.0, noise=0.2, m_max=5):
    """Centered rbf pipeline on smooth random data; returns the pipeline."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-2.0, 2.0, size=(n, d))
    y = np.sin(X[:, 0]) * np.cos(X[:, -1]) + noise * rng.standard_normal(n)
    ds = kpls.Dataset(X=X, y=y)
    return kpls.fit_kpls(ds, kpls.KernelSpec("rbf", width), m_max=m_max)


def spread_spectrum_problem(seed, n=60, lo=1e-6):
    """Full-rank symmetric K with log-spaced eigenvalues and a random target.

    The slow-converging spectrum keeps the Krylov space alive for all n
    steps, so fits reach full dimension without breakdown.
    """
    rng = np.random.default_rng(seed)
    lam = np.logspace(np.log10(lo), 0.0, n)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    K = Q @ np.diag(lam) @ Q.T
    K = np.triu(K, 1) + np.triu(K, 1).T + np.diag(np.diag(K))
    y = rng.standard_normal(n)
    return K, y, lam


@pytest.fixture
def rbf_pipeline():
    return random_rbf_problem(seed=7, n=30, m_max=5)
