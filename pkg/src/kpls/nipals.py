"""Kernel NIPALS: latent components, bidiagonal structure, fit, predict.

The fit iterates residual normalization, kernel deflation, and rank-one
updates of the fitted values, costing O(m_max n^2) total. Per-component
fitted values and kernel coefficients are stored for every truncation
level so model selection never refits.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import backend
from .errors import InvalidInputError, InvalidStateError, NumericalFailureError
from .kernels import KernelMatrix
from .linalg import SymTridiagonal, solve_upper

# scale factor for the residual-norm breakdown test
BREAKDOWN_RTOL = 1e-10
# relative Rayleigh-quotient floor detecting residuals that have left the
# numerical range of K (roundoff in the K-seminorm scales like sqrt(eps),
# which the absolute test above cannot see on rank-deficient kernels)
RANK_RTOL = 1e-12


@dataclass
class KplsModel:
    """Fitted kernel PLS state.

    T holds the orthonormal latent components, R the normalized residual
    vectors, L the upper bidiagonal coupling matrix t_i' K r_j, knorms the
    norms that scaled each component before normalization. yhat[:, m-1]
    and alpha[:, m-1] are the fitted values and kernel coefficients of the
    m-component model; predictions add back y_mean.
    """

    n: int
    m_max: int
    actual_m: int
    T: np.ndarray
    R: np.ndarray
    L: np.ndarray
    knorms: np.ndarray
    yhat: np.ndarray
    alpha: np.ndarray
    y_mean: float = 0.0
    breakdown: bool = field(default=False)

    def check_m(self, m: int) -> int:
        if not isinstance(m, (int, np.integer)) or not 1 <= m <= self.actual_m:
            raise InvalidInputError(
                f"m must be an integer in [1, {self.actual_m}], got {m!r}"
            )
        return int(m)

    def yhat_at(self, m: int) -> np.ndarray:
        return self.yhat[:, self.check_m(m) - 1]

    def alpha_at(self, m: int) -> np.ndarray:
        return self.alpha[:, self.check_m(m) - 1]


def _gram_entries(K: Union[KernelMatrix, np.ndarray], allow_uncentered: bool):
    if isinstance(K, KernelMatrix):
        if not K.centered and not allow_uncentered:
            raise InvalidStateError(
                "gram matrix is not centered; center it or pass allow_uncentered=True"
            )
        return K.entries
    entries = np.asarray(K, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise InvalidInputError("K must be a square matrix")
    return entries


def fit(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    m_max: int,
    *,
    y_mean: float = 0.0,
    reorthogonalize: bool = True,
    allow_uncentered: bool = False,
) -> KplsModel:
    """Fit up to m_max kernel PLS components.

    y is used as given (center it beforehand; y_mean is only stored for
    prediction-time un-centering). Stops early without error when the
    Krylov space is exhausted; actual_m records the components kept.
    Re-orthogonalization of each new component against the previous ones
    is on by default because the Krylov sequence is nearly collinear and
    plain deflation drifts in floating point.
    """
    Kmat = _gram_entries(K, allow_uncentered)
    y = np.asarray(y, dtype=float)
    n = Kmat.shape[0]
    if y.shape != (n,):
        raise InvalidInputError(f"y must have length {n}")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("y must be finite")
    if not isinstance(m_max, (int, np.integer)) or not 1 <= m_max <= n:
        raise InvalidInputError(f"m_max must be in [1, {n}], got {m_max!r}")
    m_max = int(m_max)

    y_norm = float(np.linalg.norm(y))
    tol_breakdown = BREAKDOWN_RTOL * (float(np.trace(Kmat)) / n) * y_norm

    Kwork = Kmat.copy()
    T = np.zeros((n, m_max))
    R = np.zeros((n, m_max))
    L = np.zeros((m_max, m_max))
    knorms = np.zeros(m_max)
    yhat_all = np.zeros((n, m_max))

    yhat = np.zeros(n)
    actual_m = 0
    broke_down = False
    trace_scale = float(np.trace(Kmat)) / n
    for i in range(m_max):
        resid = y - yhat
        # residual norm in the K^{1/2} metric, with the ORIGINAL kernel
        knsq = float(resid @ (Kmat @ resid))
        knsq = max(knsq, 0.0)
        resid_sq = float(resid @ resid)
        if (
            np.sqrt(knsq) <= tol_breakdown
            or knsq <= RANK_RTOL * trace_scale * resid_sq
        ):
            broke_down = True
            break
        r = resid / np.sqrt(knsq)

        s = Kwork @ r
        if reorthogonalize and i > 0:
            for l in range(i):
                s -= (T[:, l] @ s) * T[:, l]
        snorm = float(np.linalg.norm(s))
        if snorm <= tol_breakdown:
            broke_down = True
            break
        t = s / snorm

        if not (np.all(np.isfinite(t)) and np.isfinite(snorm)):
            raise NumericalFailureError(
                f"non-finite intermediate at component {i + 1}"
            )

        kr = Kmat @ r
        if i > 0:
            L[i - 1, i] = float(T[:, i - 1] @ kr)
        L[i, i] = float(t @ kr)

        T[:, i] = t
        R[:, i] = r
        knorms[i] = snorm
        yhat = yhat + t * float(t @ y)
        yhat_all[:, i] = yhat
        actual_m = i + 1

        if i + 1 < m_max:
            u = Kwork @ t
            backend.deflate_inplace(Kwork, t, u, float(t @ u))

    if actual_m == 0:
        raise InvalidInputError(
            "no component could be extracted: K^(1/2)-norm of y is at the "
            "breakdown threshold (is y zero or orthogonal to the kernel range?)"
        )

    T = T[:, :actual_m]
    R = R[:, :actual_m]
    L = L[:actual_m, :actual_m]
    knorms = knorms[:actual_m]
    yhat_all = yhat_all[:, :actual_m]

    # kernel coefficients for every truncation level: alpha_m = R_m L_m^{-1} T_m' y
    alpha_all = np.zeros((n, actual_m))
    tty = T.T @ y
    for m in range(1, actual_m + 1):
        z = solve_upper(L[:m, :m], tty[:m])
        alpha_all[:, m - 1] = R[:, :m] @ z

    return KplsModel(
        n=n,
        m_max=m_max,
        actual_m=actual_m,
        T=T,
        R=R,
        L=L,
        knorms=knorms,
        yhat=yhat_all,
        alpha=alpha_all,
        y_mean=float(y_mean),
        breakdown=broke_down,
    )


def predict(model: KplsModel, kx: np.ndarray, m: int) -> float:
    """Predict at a query point from its kernel column (centered like the fit)."""
    m = model.check_m(m)
    kx = np.asarray(kx, dtype=float)
    if kx.shape != (model.n,):
        raise InvalidInputError(f"kernel column must have length {model.n}")
    return float(model.alpha[:, m - 1] @ kx + model.y_mean)


def tridiagonal_D(model: KplsModel, m_max: int | None = None) -> SymTridiagonal:
    """The restricted-map matrix D = L^T L of the leading m_max components.

    L^T L of an upper bidiagonal L is exactly tridiagonal, so D is built
    entry by entry in O(m_max) with no dense product.
    """
    if m_max is None:
        m_max = model.actual_m
    m_max = model.check_m(m_max)
    ldiag = np.diag(model.L)[:m_max]
    lsup = np.diag(model.L, 1)[: m_max - 1] if m_max > 1 else np.zeros(0)
    diag = ldiag**2
    if m_max > 1:
        diag[1:] += lsup**2
    offdiag = ldiag[:-1] * lsup if m_max > 1 else np.zeros(0)
    return SymTridiagonal(diag=diag, offdiag=offdiag)
