"""End-to-end convenience wrapper: gram, centering, fit, predict, bands."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .datasets import Dataset
from .errors import InvalidInputError
from .intervals import ConfidenceBand, confidence_band
from .kernels import (
    KernelMatrix,
    KernelSpec,
    center,
    center_targets,
    centered_column,
    gram,
    kernel_column,
)
from .nipals import KplsModel, fit, predict


@dataclass
class KplsPipeline:
    """A fitted model bundled with its data, kernel, and centering state."""

    dataset: Dataset
    spec: KernelSpec
    K: KernelMatrix
    model: KplsModel

    @property
    def y_centered(self) -> np.ndarray:
        return self.dataset.y - self.model.y_mean

    def query_column(self, x: np.ndarray) -> np.ndarray:
        """Kernel column of a query point, centered like the training gram."""
        kx = kernel_column(self.spec, self.dataset.X, x)
        if self.K.centered:
            kx = centered_column(self.K, kx)
        return kx

    def predict(self, X_new: Union[np.ndarray, list], m: int) -> np.ndarray:
        X_new = np.asarray(X_new, dtype=float)
        if X_new.ndim == 1:
            X_new = X_new[:, None]
        if X_new.shape[1] != self.dataset.d:
            raise InvalidInputError("query dimension does not match training data")
        return np.array(
            [predict(self.model, self.query_column(x), m) for x in X_new]
        )

    def band(
        self,
        grid,
        m: int,
        level: float,
        sigma: Optional[float] = None,
    ) -> ConfidenceBand:
        return confidence_band(
            self.model,
            self.K,
            self.dataset.X,
            self.y_centered,
            grid,
            m,
            level,
            sigma,
        )


def fit_kpls(
    dataset: Dataset,
    spec: KernelSpec,
    m_max: int,
    center_data: bool = True,
    reorthogonalize: bool = True,
) -> KplsPipeline:
    """Build the centered gram, center the targets, and fit the model."""
    K = gram(spec, dataset.X)
    if center_data:
        K = center(K)
        y_c, y_mean = center_targets(dataset.y)
    else:
        y_c, y_mean = np.asarray(dataset.y, dtype=float), 0.0
    model = fit(
        K,
        y_c,
        m_max,
        y_mean=y_mean,
        reorthogonalize=reorthogonalize,
        allow_uncentered=not center_data,
    )
    return KplsPipeline(dataset=dataset, spec=spec, K=K, model=model)
