"""Synthetic regression datasets and CSV ingestion.

All generators run on the in-repo deterministic generator, so a seed
pins the dataset bit-for-bit. CSV files carry a header x1..xd,y.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import CsvParseError, InvalidInputError
from .rng import Rng


@dataclass
class Dataset:
    """Inputs X (n x d) and targets y (n,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise InvalidInputError("X must be n x d and y length n")
        if X.shape[0] < 2:
            raise InvalidInputError("need at least 2 observations")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidInputError("dataset entries must be finite")
        self.X = X
        self.y = y

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def sinc(x: float) -> float:
    """sin(x)/x with the removable singularity filled: sinc(0) = 1."""
    return 1.0 if x == 0.0 else math.sin(x) / x


def synth_sinc(n: int = 100, sigma: float = 0.1, seed: int = 0) -> Dataset:
    """1-D sinc regression: x uniform on [-pi, pi], y = sinc(x) + noise."""
    if n < 2 or sigma < 0:
        raise InvalidInputError("need n >= 2 and sigma >= 0")
    rng = Rng(seed)
    x = np.array([-math.pi + 2.0 * math.pi * rng.uniform() for _ in range(n)])
    noise = np.array([sigma * rng.normal() for _ in range(n)])
    y = np.array([sinc(v) for v in x]) + noise
    return Dataset(X=x[:, None], y=y)


def polymix_curve(x: np.ndarray) -> np.ndarray:
    """Noiseless target of the mixture demo: (x-1)(x+2)(x-1.5) exp(-x^2/10)."""
    x = np.asarray(x, dtype=float)
    return (x - 1.0) * (x + 2.0) * (x - 1.5) * np.exp(-(x**2) / 10.0)


def synth_polymix(n: int = 40, sigma: float = 1.0, seed: int = 0) -> Dataset:
    """1-D polynomial-times-Gaussian target, inputs from an equal mixture
    of Normal(-2, 1) and Normal(3, 1)."""
    if n < 2 or sigma < 0:
        raise InvalidInputError("need n >= 2 and sigma >= 0")
    rng = Rng(seed)
    x = np.zeros(n)
    for i in range(n):
        center = -2.0 if rng.uniform() < 0.5 else 3.0
        x[i] = center + rng.normal()
    noise = np.array([sigma * rng.normal() for _ in range(n)])
    y = polymix_curve(x) + noise
    return Dataset(X=x[:, None], y=y)


# planar arm segment lengths for the kinematics surrogate
_ARM_LINKS = (1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)


def synth_kinlike(n: int, seed: int = 0, sigma: float = 0.05) -> Dataset:
    """8-D forward-kinematics surrogate.

    Eight joint angles drawn uniformly from [-pi, pi]; the target is the
    horizontal end-effector coordinate of a planar arm with fixed segment
    lengths, plus a little noise. Stands in for an external robot-arm
    dataset so the runtime benchmark is self-contained.
    """
    if n < 2 or sigma < 0:
        raise InvalidInputError("need n >= 2 and sigma >= 0")
    rng = Rng(seed)
    X = np.zeros((n, 8))
    y = np.zeros(n)
    for i in range(n):
        angles = [-math.pi + 2.0 * math.pi * rng.uniform() for _ in range(8)]
        X[i] = angles
        cum = 0.0
        pos = 0.0
        for length, angle in zip(_ARM_LINKS, angles):
            cum += angle
            pos += length * math.cos(cum)
        y[i] = pos + sigma * rng.normal()
    return Dataset(X=X, y=y)


def load_csv(path) -> Dataset:
    """Read a dataset CSV with header x1..xd,y."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError("empty file", line=1) from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[-1] != "y":
            raise CsvParseError(
                "header must be x1,...,xd,y (last column named 'y')", line=1
            )
        width = len(header)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise CsvParseError(
                    f"expected {width} columns, got {len(row)}", line=line_no
                )
            values = []
            for col_no, cell in enumerate(row, start=1):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvParseError(
                        f"non-numeric value {cell!r} at line {line_no}, "
                        f"column {col_no} ({header[col_no - 1]})",
                        line=line_no,
                        column=col_no,
                    ) from None
            rows.append(values)
    if len(rows) < 2:
        raise CsvParseError("need at least 2 data rows", line=len(rows) + 1)
    data = np.array(rows)
    return Dataset(X=data[:, :-1], y=data[:, -1])


def dataset_header(d: int) -> list:
    return [f"x{i + 1}" for i in range(d)] + ["y"]
