"""Numpy implementations of the hot kernels.

Same signatures as the compiled module kpls._core; kpls.backend picks one
of the two at import time. Every function here must preserve the exact
structural guarantees the compiled core provides: gram matrices are
bitwise symmetric, rbf diagonals are exactly 1, and deflation/centering
updates keep a symmetric input bitwise symmetric.
"""

import numpy as np

IS_COMPILED = False


def rbf_gram(X: np.ndarray, width: float) -> np.ndarray:
    """Gaussian gram matrix exp(-|x_i - x_j|^2 / (2 width^2))."""
    sq_norms = np.einsum("ij,ij->i", X, X)
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    K = np.exp(d2 / (-2.0 * width * width))
    # mirror the upper triangle so K is symmetric bitwise, not just to roundoff
    upper = np.triu(K, 1)
    K = upper + upper.T
    np.fill_diagonal(K, 1.0)
    return K


def linear_gram(X: np.ndarray) -> np.ndarray:
    """Inner-product gram matrix X X^T, bitwise symmetric."""
    K = X @ X.T
    upper = np.triu(K, 1)
    out = upper + upper.T
    np.fill_diagonal(out, np.diag(K))
    return out


def deflate_inplace(K: np.ndarray, t: np.ndarray, u: np.ndarray, c: float) -> None:
    """Apply K <- (I - t t^T) K (I - t t^T) in place, given u = K t and c = t^T u.

    The update K -= t u^T + u t^T - c t t^T is assembled as one symmetric
    matrix before subtracting, which keeps K bitwise symmetric.
    """
    upd = np.outer(t, u)
    upd += np.outer(u, t)
    upd -= c * np.outer(t, t)
    K -= upd


def center_inplace(K: np.ndarray):
    """Double-center K in place; returns (column means, grand mean) of the input."""
    col_means = K.mean(axis=0)
    grand_mean = float(col_means.mean())
    K -= col_means[:, None] + col_means[None, :]
    K += grand_mean
    return col_means, grand_mean
