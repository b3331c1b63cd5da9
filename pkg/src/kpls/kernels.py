"""Kernel functions, gram matrices, and double centering.

The rbf kernel is parametrized by its length scale:
k(x, z) = exp(-|x - z|^2 / (2 width^2)). Centered gram matrices keep the
column means of the uncentered matrix so kernel columns of new points can
be centered consistently at prediction time.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import InvalidInputError, InvalidStateError

KERNEL_KINDS = ("rbf", "linear")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its width (rbf only)."""

    kind: str = "rbf"
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise InvalidInputError(f"kernel kind must be one of {KERNEL_KINDS}")
        if self.kind == "rbf" and not self.width > 0:
            raise InvalidInputError("rbf width must be positive")


@dataclass
class KernelMatrix:
    """Dense symmetric gram matrix with centering metadata.

    train_col_means and train_mean hold column means and grand mean of the
    uncentered matrix; they are set when the matrix is centered and are
    needed to center test-point kernel columns the same way.
    """

    n: int
    entries: np.ndarray
    centered: bool
    spec: KernelSpec
    train_col_means: Optional[np.ndarray] = None
    train_mean: Optional[float] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape != (self.n, self.n):
            raise InvalidInputError("entries must be an n x n matrix")
        self.entries = entries


def kernel_eval(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    """Evaluate the kernel on a single pair of points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if x.shape != z.shape or x.ndim != 1:
        raise InvalidInputError("x and z must be vectors of the same dimension")
    if spec.kind == "linear":
        return float(x @ z)
    diff = x - z
    return float(np.exp(-(diff @ diff) / (2.0 * spec.width**2)))


def kernel_column(spec: KernelSpec, X: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Uncentered kernel column (k(x, x_1), ..., k(x, x_n)) against rows of X."""
    X = np.asarray(X, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if X.ndim != 2 or x.shape != (X.shape[1],):
        raise InvalidInputError("query point dimension does not match training data")
    if spec.kind == "linear":
        return X @ x
    d2 = np.einsum("ij,ij->i", X - x, X - x)
    return np.exp(-d2 / (2.0 * spec.width**2))


def gram(spec: KernelSpec, points: np.ndarray) -> KernelMatrix:
    """Uncentered gram matrix of the given points (rows)."""
    try:
        X = np.asarray(points, dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"points must be rectangular numeric data: {exc}")
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidInputError("points must be a nonempty n x d array")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("points must be finite")
    if spec.kind == "linear":
        entries = backend.linear_gram(np.ascontiguousarray(X))
    else:
        entries = backend.rbf_gram(np.ascontiguousarray(X), spec.width)
    return KernelMatrix(n=X.shape[0], entries=entries, centered=False, spec=spec)


def center(K: KernelMatrix) -> KernelMatrix:
    """Double-center a gram matrix: K <- (I - 11'/n) K (I - 11'/n).

    Returns a new KernelMatrix carrying the uncentered column means and
    grand mean; centering twice raises.
    """
    if K.centered:
        raise InvalidStateError("kernel matrix is already centered")
    entries = K.entries.copy()
    col_means, grand_mean = backend.center_inplace(entries)
    return KernelMatrix(
        n=K.n,
        entries=entries,
        centered=True,
        spec=K.spec,
        train_col_means=np.asarray(col_means, dtype=float),
        train_mean=grand_mean,
    )


def center_targets(y: np.ndarray):
    """Center the response; returns (centered y, mean) for later un-centering."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise InvalidInputError("y must be a nonempty vector")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("y must be finite")
    mean = float(y.mean())
    return y - mean, mean


def centered_column(K: KernelMatrix, kx: np.ndarray) -> np.ndarray:
    """Center a test-point kernel column consistently with a centered gram.

    Applies k_c(x) = (I - 11'/n)(k(x) - K 1/n) using the stored column
    means of the uncentered training gram.
    """
    if not K.centered:
        raise InvalidStateError("kernel matrix is not centered")
    kx = np.asarray(kx, dtype=float)
    if kx.shape != (K.n,):
        raise InvalidInputError(f"kernel column must have length {K.n}")
    return kx - K.train_col_means - kx.mean() + K.train_mean
