"""Degrees of freedom of the kernel PLS fit.

dof_exact evaluates the closed-form trace of the fit's Jacobian with
respect to the targets; its kernel-power traces make it cubic in n.
dof_approx replaces those traces with power sums of the Ritz values of
the small tridiagonal restriction D, dropping the cost to quadratic in n
(and cubic only in the component budget). A finite-difference Jacobian
and an a priori Ritz gap bound serve as independent checks.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    InvalidInputError,
    NearBreakdownError,
    OracleInconclusiveError,
)
from .kernels import KernelMatrix
from .linalg import SINGULAR_RTOL, solve_upper, symtri_eigenvalues, trace_powers
from .nipals import KplsModel, fit, tridiagonal_D


def _entries(K: Union[KernelMatrix, np.ndarray]) -> np.ndarray:
    return K.entries if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)


@dataclass
class KrylovMoments:
    """Change of basis between the Krylov sequence and the latent components.

    B is upper triangular with b_ij = <t_i, K^j y>; c solves B c = T' y
    (the fit's coordinates in the Krylov basis) and V = T B^{-T} holds the
    dual basis vectors.
    """

    m: int
    B: np.ndarray
    c: np.ndarray
    V: np.ndarray


@dataclass
class DofReport:
    """Degrees-of-freedom value and the terms it decomposes into.

    dof = term_trace - term_latent + term_residual + plus_m, where
    term_trace is sum_j c_j tr(K^j) for the exact variant and
    sum_j c_j tr(D_{m_max}^j) for the approximate one.
    """

    m: int
    dof_exact: Optional[float]
    dof_approx: Optional[float]
    m_max_used: int
    term_trace: float
    term_latent: float
    term_residual: float
    plus_m: int
    warning: Optional[str] = None

    @property
    def dof(self) -> float:
        return self.dof_exact if self.dof_exact is not None else self.dof_approx


@dataclass
class RitzGapReport:
    """Per-index eigenvalue versus Ritz value, with the a priori gap bound.

    The bound follows the classical Kaniel-Paige-Saad inequality; its
    gamma index pattern degenerates at the edges, and entries where a
    denominator vanishes are reported as inf. Only the left inequality
    (gap >= 0) is load-bearing; bounds_informational marks the right-hand
    side as diagnostic output.
    """

    m: int
    lambdas: np.ndarray
    mus: np.ndarray
    gaps: np.ndarray
    bounds: np.ndarray
    thetas: np.ndarray
    bounds_informational: bool = True


def krylov_moments(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    model: KplsModel,
    m: int,
) -> KrylovMoments:
    """Build B, c = B^{-1} T'y and V = T B^{-T} for the leading m components.

    The Krylov vectors K^j y are formed by repeated matrix-vector
    products, O(m n^2). Entries of B below the diagonal are exact zeros
    by construction (they vanish mathematically; the computed values are
    roundoff-sized and are not stored).
    """
    Kmat = _entries(K)
    m = model.check_m(m)
    y = np.asarray(y, dtype=float)
    n = Kmat.shape[0]
    if y.shape != (n,):
        raise InvalidInputError(f"y must have length {n}")

    T = model.T[:, :m]
    Q = np.zeros((n, m))
    q = y
    for j in range(m):
        q = Kmat @ q
        Q[:, j] = q
    B = np.triu(T.T @ Q)

    bdiag = np.abs(np.diag(B))
    if np.any(bdiag <= SINGULAR_RTOL * bdiag.max()):
        bad = int(np.nonzero(bdiag <= SINGULAR_RTOL * bdiag.max())[0][0])
        raise NearBreakdownError(
            f"Krylov basis is numerically collinear at component {bad + 1}; "
            f"use a smaller m"
        )

    c = solve_upper(B, T.T @ y)
    Binv_t = np.zeros((m, m))
    eye = np.eye(m)
    for j in range(m):
        Binv_t[:, j] = solve_upper(B, eye[:, j], transpose=True)
    V = T @ Binv_t
    return KrylovMoments(m=m, B=B, c=c, V=V)


def _latent_and_residual_terms(Kmat, y, model, m, moments):
    """Shared quadratic-cost terms of the two DoF variants.

    term_latent = sum_j c_j sum_l t_l' K^j t_l, evaluated with iterated
    matrix-vector products; term_residual = (y - yhat_m)' sum_j K^j v_j
    via a Horner-style sweep.
    """
    T = model.T[:, :m]
    c = moments.c
    V = moments.V

    # sum_j c_j sum_l t_l' K^j t_l, with the m per-component power chains
    # batched into one n x m block per power
    term_latent = 0.0
    Z = T
    for j in range(m):
        Z = Kmat @ Z
        term_latent += c[j] * float(np.einsum("il,il->", T, Z))

    resid = y - model.yhat[:, m - 1]
    acc = V[:, m - 1]
    for j in range(m - 2, -1, -1):
        acc = V[:, j] + Kmat @ acc
    term_residual = float(resid @ (Kmat @ acc))
    return term_latent, term_residual


def dof_exact(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    model: KplsModel,
    m: int,
) -> DofReport:
    """Exact plug-in degrees of freedom of the m-component fit.

    The kernel-power traces tr(K^j), j = 1..m, are accumulated by
    explicit matrix products; this is the cubic-in-n reference path.
    """
    Kmat = _entries(K)
    m = model.check_m(m)
    moments = krylov_moments(Kmat, y, model, m)

    term_trace = 0.0
    P = Kmat
    for j in range(m):
        if j > 0:
            P = P @ Kmat
        term_trace += moments.c[j] * float(np.trace(P))

    term_latent, term_residual = _latent_and_residual_terms(
        Kmat, np.asarray(y, dtype=float), model, m, moments
    )
    value = term_trace - term_latent + term_residual + m
    return DofReport(
        m=m,
        dof_exact=value,
        dof_approx=None,
        m_max_used=m,
        term_trace=term_trace,
        term_latent=term_latent,
        term_residual=term_residual,
        plus_m=m,
    )


def dof_approx(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    model: KplsModel,
    m: int,
    m_max: Optional[int] = None,
) -> DofReport:
    """Approximate degrees of freedom via Ritz values of D_{m_max}.

    Identical to dof_exact except that tr(K^j) is replaced by
    tr(D_{m_max}^j) = sum_i mu_i^j, computed from the eigenvalues of the
    m_max x m_max tridiagonal restriction. No n x n matrix product occurs
    anywhere on this path; total cost O(m_max n^2 + m_max^3).
    """
    Kmat = _entries(K)
    m = model.check_m(m)
    if m_max is None:
        m_max = model.actual_m
    if not isinstance(m_max, (int, np.integer)) or m_max < m:
        raise InvalidInputError(f"m_max must be an integer >= m = {m}")
    warning = None
    if m_max > model.actual_m:
        warning = (
            f"m_max truncated from {m_max} to {model.actual_m}: the Krylov "
            f"space was exhausted during fitting"
        )
        m_max = model.actual_m
    m_max = int(m_max)

    moments = krylov_moments(Kmat, y, model, m)
    mus = symtri_eigenvalues(tridiagonal_D(model, m_max))
    term_trace = 0.0
    for j in range(1, m + 1):
        term_trace += moments.c[j - 1] * trace_powers(mus, j)

    term_latent, term_residual = _latent_and_residual_terms(
        Kmat, np.asarray(y, dtype=float), model, m, moments
    )
    value = term_trace - term_latent + term_residual + m
    return DofReport(
        m=m,
        dof_exact=None,
        dof_approx=value,
        m_max_used=m_max,
        term_trace=term_trace,
        term_latent=term_latent,
        term_residual=term_residual,
        plus_m=m,
        warning=warning,
    )


def chebyshev(order: int, x: float) -> float:
    """Chebyshev polynomial of the first kind by the three-term recurrence."""
    if order < 0:
        raise InvalidInputError("Chebyshev order must be >= 0")
    if order == 0:
        return 1.0
    prev, cur = 1.0, x
    for _ in range(order - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def ritz_gap_bounds(
    k_eigvals: np.ndarray,
    k_eigvecs: np.ndarray,
    model: KplsModel,
    y: np.ndarray,
    m: int,
) -> RitzGapReport:
    """Gaps lambda_i - mu_i between kernel eigenvalues and Ritz values.

    Needs the dense eigendecomposition of K, so this is a cubic,
    diagnostic-only path. theta_i is the K-metric angle between y and the
    i-th eigenvector; kappa and gamma follow the printed bound, with
    degenerate denominators mapped to an infinite bound.
    """
    lam = np.asarray(k_eigvals, dtype=float)
    U = np.asarray(k_eigvecs, dtype=float)
    y = np.asarray(y, dtype=float)
    m = model.check_m(m)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    U = U[:, order]
    n = lam.size

    y_k_norm_sq = float(np.sum(np.maximum(lam, 0.0) * (U.T @ y) ** 2))
    if y_k_norm_sq <= 0.0:
        raise InvalidInputError("y has zero K-norm; angles are undefined")
    y_k_norm = math.sqrt(y_k_norm_sq)

    mus = symtri_eigenvalues(tridiagonal_D(model, m))
    lam_top = lam[:m]
    gaps = lam_top - mus

    thetas = np.zeros(m)
    bounds = np.zeros(m)
    lam_min = lam[-1]
    spread = lam[0] - lam_min
    for i in range(m):
        proj = math.sqrt(max(lam[i], 0.0)) * float(U[:, i] @ y)
        cos_theta = min(1.0, max(-1.0, proj / y_k_norm))
        theta = math.acos(cos_theta)
        thetas[i] = theta

        kappa = 1.0
        for j in range(i):
            denom = mus[j] - lam[i]
            if denom == 0.0:
                kappa = math.inf
                break
            kappa *= (mus[j] - lam_min) / denom

        if i == 0:
            gamma = 0.0  # the index pattern has no lambda_0; numerator taken as 0
        elif i + 1 < n:
            denom = lam[i + 1] - lam_min
            gamma = (lam[i] - lam[i - 1]) / denom if denom != 0.0 else 0.0
        else:
            gamma = 0.0

        cheb = chebyshev(m - (i + 1), 1.0 + 2.0 * gamma)
        tan_theta = math.tan(theta)
        if cheb == 0.0 or not math.isfinite(kappa) or not math.isfinite(tan_theta):
            bounds[i] = math.inf
        else:
            bounds[i] = spread * (kappa * tan_theta / cheb) ** 2

    return RitzGapReport(
        m=m, lambdas=lam_top, mus=mus, gaps=gaps, bounds=bounds, thetas=thetas
    )


def jacobian_fd(
    K: Union[KernelMatrix, np.ndarray],
    y: np.ndarray,
    m: int,
    step: Optional[float] = None,
    *,
    of_alpha: bool = False,
) -> np.ndarray:
    """Finite-difference Jacobian of the m-component fit with respect to y.

    Central differences, refitting per perturbed coordinate; the ground
    truth the closed forms are tested against. With of_alpha=True the
    Jacobian of the kernel coefficients is returned instead of the fitted
    values.
    """
    Kmat = _entries(K)
    y = np.asarray(y, dtype=float)
    n = y.size
    if step is None:
        step = 1e-5 * float(np.linalg.norm(y))
    if not step > 0:
        raise InvalidInputError("step must be positive")

    def fitted(y_pert):
        model = fit(Kmat, y_pert, m)
        if model.actual_m < m:
            raise OracleInconclusiveError(
                f"perturbed fit broke down at {model.actual_m} < {m} components"
            )
        return model.alpha[:, m - 1] if of_alpha else model.yhat[:, m - 1]

    J = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        J[:, j] = (fitted(y + e) - fitted(y - e)) / (2.0 * step)
    return J
