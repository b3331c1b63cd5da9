"""Minimal dense linear algebra shared by the fitting and sensitivity code.

Symmetric tridiagonal eigenvalues (implicit-shift QL, no densification),
triangular solves with a relative singularity guard, checked matrix-vector
products, and spectral power sums. Everything is float64 and pure: no
function mutates its inputs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError, SingularMatrixError

# relative floor below which a triangular diagonal counts as singular
SINGULAR_RTOL = 1e-12

_QL_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SymTridiagonal:
    """Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        offdiag = np.asarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise InvalidInputError("diag must be a vector of length >= 1")
        if offdiag.ndim != 1 or offdiag.size != diag.size - 1:
            raise InvalidInputError("offdiag must have length len(diag) - 1")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def order(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        dense = np.diag(self.diag)
        if self.order > 1:
            dense += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return dense


def symtri_eigenvalues(tri: SymTridiagonal) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, sorted descending.

    Implicit-shift QL iteration on the tridiagonal representation itself,
    O(m^2) for an m x m input. Deterministic for a fixed input.
    """
    if not (np.all(np.isfinite(tri.diag)) and np.all(np.isfinite(tri.offdiag))):
        raise InvalidInputError("tridiagonal entries must be finite")
    m = tri.order
    d = tri.diag.copy()
    if m == 1:
        return d
    e = np.zeros(m)
    e[: m - 1] = tri.offdiag
    eps = np.finfo(float).eps

    for l in range(m):
        sweeps = 0
        while True:
            # find the first negligible subdiagonal element at or after l
            for split in range(l, m - 1):
                scale = abs(d[split]) + abs(d[split + 1])
                if abs(e[split]) <= eps * scale:
                    break
            else:
                split = m - 1
            if split == l:
                break
            sweeps += 1
            if sweeps > _QL_MAX_SWEEPS:
                raise NumericalFailureError(
                    "tridiagonal QL iteration failed to converge"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[split] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(split - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[split] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[split] = 0.0

    return np.sort(d)[::-1].copy()


def solve_upper(U: np.ndarray, b: np.ndarray, transpose: bool = False) -> np.ndarray:
    """Solve U x = b by back substitution, or U^T x = b (forward) if transpose.

    U must be upper triangular with exact zeros below the diagonal; its
    diagonal must clear the relative singularity floor
    SINGULAR_RTOL * max|u_ii|.
    """
    U = np.asarray(U, dtype=float)
    b = np.asarray(b, dtype=float)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidInputError("U must be square")
    m = U.shape[0]
    if b.shape != (m,):
        raise InvalidInputError(f"b must have shape ({m},), got {b.shape}")
    if np.any(np.tril(U, -1) != 0.0):
        raise InvalidInputError("U has nonzero entries below the diagonal")
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(b))):
        raise InvalidInputError("inputs must be finite")

    diag = np.abs(np.diag(U))
    tol = SINGULAR_RTOL * diag.max()
    small = np.nonzero(diag <= tol)[0]
    if small.size:
        idx = int(small[0])
        raise SingularMatrixError(
            f"triangular diagonal entry {idx} is below the singularity floor", idx
        )

    x = np.zeros(m)
    if transpose:
        for i in range(m):
            x[i] = (b[i] - U[:i, i] @ x[:i]) / U[i, i]
    else:
        for i in range(m - 1, -1, -1):
            x[i] = (b[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Checked matrix-vector product A @ x."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    if A.ndim != 2 or x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise InvalidInputError(
            f"dimension mismatch: A is {A.shape}, x has length {x.shape}"
        )
    return A @ x


def trace_powers(eigs: np.ndarray, j: int) -> float:
    """Trace of the j-th power of a matrix given its eigenvalues: sum eigs^j."""
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise InvalidInputError("power j must be an integer >= 1")
    eigs = np.asarray(eigs, dtype=float)
    if not np.all(np.isfinite(eigs)):
        raise InvalidInputError("eigenvalues must be finite")
    return float(np.sum(eigs**j))


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, accurate to about 1e-9 relative.

    Rational approximation (Acklam's coefficients) with one Halley
    refinement step, so no dependency on scipy.
    """
    if not 0.0 < p < 1.0:
        raise InvalidInputError("quantile argument must be in (0, 1)")

    a = (
        -3.969683028665376e01,
        2.209460984245205e02,
        -2.759285104469687e02,
        1.383577518672690e02,
        -3.066479806614716e01,
        2.506628277459239e00,
    )
    b = (
        -5.447609879822406e01,
        1.615858368580409e02,
        -1.556989798598866e02,
        6.680131188771972e01,
        -1.328068155288572e01,
    )
    c = (
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e00,
        -2.549732539343734e00,
        4.374664141464968e00,
        2.938163982698783e00,
    )
    d = (
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e00,
        3.754408661907416e00,
    )
    p_low = 0.02425

    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / (
            (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        )

    # one Halley step against the exact CDF via erfc
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    x = x - u / (1.0 + x * u / 2.0)
    return x
