"""Pointwise confidence intervals in quadratic time.

The predictive standard error at a query point is sigma * |H' k(x)|,
where H is the Jacobian of the kernel coefficients with respect to the
targets. H' k(x) is evaluated right-to-left as a chain of matrix-vector
and low-rank products, so no n x n matrix product is ever formed.

Convention note: the closed form is evaluated with the exact bidiagonal
coupling matrix L, i.e. with T L^{-T} R' and U = R L^{-1} B^{-T}, not
with a diagonal approximation of L. The finite-difference Jacobian of
the coefficients arbitrates this choice; see the triangular-solve sites
below and the oracle tests.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import CannotEstimateSigmaError, InvalidInputError
from .kernels import KernelMatrix, centered_column, kernel_column
from .linalg import normal_quantile, solve_upper
from .nipals import KplsModel, predict
from .sensitivity import dof_approx, dof_exact, krylov_moments


def _entries(K: Union[KernelMatrix, np.ndarray]) -> np.ndarray:
    return K.entries if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)


@dataclass
class SensitivityCache:
    """Query-independent pieces of the H' k(x) evaluation for fixed m.

    c and V come from the Krylov moments; U = R L^{-1} B^{-T}; k_resid is
    K (y - yhat_m). T, R, L are the leading-m blocks of the model's.
    """

    m: int
    c: np.ndarray
    V: np.ndarray
    U: np.ndarray
    T: np.ndarray
    R: np.ndarray
    L: np.ndarray
    resid: np.ndarray
    k_resid: np.ndarray


def build_sensitivity_cache(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    model: KplsModel,
    m: int,
) -> SensitivityCache:
    """Precompute everything H' k(x) needs that does not depend on x."""
    Kmat = _entries(K)
    m = model.check_m(m)
    y = np.asarray(y, dtype=float)
    moments = krylov_moments(Kmat, y, model, m)

    T = model.T[:, :m]
    R = model.R[:, :m]
    L = model.L[:m, :m]

    # U = R L^{-1} B^{-T}, assembled column-wise from triangular solves
    eye = np.eye(m)
    binv_t = np.column_stack(
        [solve_upper(moments.B, eye[:, j], transpose=True) for j in range(m)]
    )
    linv_binv_t = np.column_stack(
        [solve_upper(L, binv_t[:, j]) for j in range(m)]
    )
    U = R @ linv_binv_t

    resid = y - model.yhat[:, m - 1]
    return SensitivityCache(
        m=m,
        c=moments.c,
        V=moments.V,
        U=U,
        T=T,
        R=R,
        L=L,
        resid=resid,
        k_resid=Kmat @ resid,
    )


def h_transpose_k(
    cache: SensitivityCache,
    K: Union[KernelMatrix, np.ndarray],
    kx: np.ndarray,
) -> np.ndarray:
    """H' k(x) for the kernel column kx of one query point, in O(m n^2).

    Evaluates
        sum_j K^(j-1) { c_j (I - K T L^{-T} R') + K (y - yhat) u_j' } k(x)
        + T L^{-T} R' k(x)
    right-to-left: one triangular solve and two matrix-vector products up
    front, then a Horner sweep over the kernel powers.
    """
    Kmat = _entries(K)
    kx = np.asarray(kx, dtype=float)
    n = Kmat.shape[0]
    if kx.shape != (n,):
        raise InvalidInputError(f"kernel column must have length {n}")

    m = cache.m
    a = cache.T @ solve_upper(cache.L, cache.R.T @ kx, transpose=True)
    w = kx - Kmat @ a
    uk = cache.U.T @ kx

    acc = cache.c[m - 1] * w + uk[m - 1] * cache.k_resid
    for j in range(m - 2, -1, -1):
        acc = Kmat @ acc
        acc += cache.c[j] * w + uk[j] * cache.k_resid
    return acc + a


def predictive_stderr(
    cache: SensitivityCache,
    K: Union[KernelMatrix, np.ndarray],
    kx: np.ndarray,
    sigma: float,
) -> float:
    """Standard error sigma * |H' k(x)| of the prediction at one point."""
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    return float(sigma * np.linalg.norm(h_transpose_k(cache, K, kx)))


@dataclass
class ConfidenceBand:
    """Pointwise two-sided confidence band over a grid of query points."""

    points: np.ndarray
    prediction: np.ndarray
    stderr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    sigma: float
    m: int


def estimate_sigma(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    model: KplsModel,
    m: int,
    *,
    use_approx_dof: bool = True,
) -> float:
    """Residual noise estimate sigma^2 = |y - yhat_m|^2 / (n - DoF(m)).

    Uses the approximate degrees of freedom by default so the whole
    confidence-band pipeline stays quadratic; DoF is clamped to n - 1.
    """
    m = model.check_m(m)
    y = np.asarray(y, dtype=float)
    n = y.size
    if use_approx_dof:
        dof = dof_approx(K, y, model, m).dof
    else:
        dof = dof_exact(K, y, model, m).dof
    if dof >= n:
        raise CannotEstimateSigmaError(
            f"estimated degrees of freedom {dof:.3f} >= n = {n}; "
            f"pass sigma explicitly"
        )
    dof = min(dof, n - 1)
    rss = float(np.sum((y - model.yhat[:, m - 1]) ** 2))
    if rss <= 1e-24 * float(y @ y):
        raise CannotEstimateSigmaError(
            "the fit interpolates the targets (zero residual); pass sigma explicitly"
        )
    return float(np.sqrt(rss / (n - dof)))


def confidence_band(
    model: KplsModel,
    K: KernelMatrix,
    X_train: np.ndarray,
    y: np.ndarray,
    grid: Union[Sequence, np.ndarray],
    m: int,
    level: float,
    sigma: Optional[float] = None,
) -> ConfidenceBand:
    """Prediction, standard error, and interval at each grid point.

    y is the centered response the model was fitted on. If sigma is not
    given it is estimated from the residuals with the approximate degrees
    of freedom.
    """
    if not 0.0 < level < 1.0:
        raise InvalidInputError("level must be in (0, 1)")
    m = model.check_m(m)
    X_train = np.asarray(X_train, dtype=float)
    grid_arr = np.asarray(grid, dtype=float)
    if grid_arr.ndim == 1:
        grid_arr = grid_arr[:, None]
    if grid_arr.shape[1] != X_train.shape[1]:
        raise InvalidInputError(
            "grid points must have the training input dimension"
        )

    if sigma is None:
        sigma = estimate_sigma(K, y, model, m)

    cache = build_sensitivity_cache(K, y, model, m)
    z = normal_quantile(0.5 * (1.0 + level))

    n_grid = grid_arr.shape[0]
    pred = np.zeros(n_grid)
    se = np.zeros(n_grid)
    for i in range(n_grid):
        kx = kernel_column(K.spec, X_train, grid_arr[i])
        if K.centered:
            kx = centered_column(K, kx)
        pred[i] = predict(model, kx, m)
        se[i] = predictive_stderr(cache, K, kx, sigma)

    return ConfidenceBand(
        points=grid_arr,
        prediction=pred,
        stderr=se,
        lower=pred - z * se,
        upper=pred + z * se,
        level=float(level),
        sigma=float(sigma),
        m=m,
    )
