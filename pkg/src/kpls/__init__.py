"""Kernel partial least squares with quadratic-time model diagnostics.

Fits kernel PLS by NIPALS, computes exact (cubic) and Ritz-approximated
(quadratic) degrees of freedom, pointwise confidence intervals through
the coefficient Jacobian, and gMDL model selection over a width by
components grid. A compiled core accelerates the hot kernels when built;
kpls.backend reports which implementation is active.
"""

from .backend import IS_COMPILED, NAME as BACKEND_NAME
from .datasets import (
    Dataset,
    load_csv,
    synth_kinlike,
    synth_polymix,
    synth_sinc,
)
from .errors import (
    CannotEstimateSigmaError,
    CsvParseError,
    InvalidInputError,
    InvalidStateError,
    KplsError,
    NearBreakdownError,
    NumericalFailureError,
    OracleInconclusiveError,
    SelectionFailedError,
    SingularMatrixError,
)
from .intervals import (
    ConfidenceBand,
    SensitivityCache,
    build_sensitivity_cache,
    confidence_band,
    estimate_sigma,
    h_transpose_k,
    predictive_stderr,
)
from .kernels import (
    KernelMatrix,
    KernelSpec,
    center,
    center_targets,
    centered_column,
    gram,
    kernel_column,
    kernel_eval,
)
from .linalg import (
    SymTridiagonal,
    matvec,
    normal_quantile,
    solve_upper,
    symtri_eigenvalues,
    trace_powers,
)
from .nipals import KplsModel, fit, predict, tridiagonal_D
from .persist import load_model, save_model
from .pipeline import KplsPipeline, fit_kpls
from .rng import Rng
from .selection import SelectionGrid, SelectionReport, gmdl, select
from .sensitivity import (
    DofReport,
    KrylovMoments,
    RitzGapReport,
    chebyshev,
    dof_approx,
    dof_exact,
    jacobian_fd,
    krylov_moments,
    ritz_gap_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "CannotEstimateSigmaError",
    "ConfidenceBand",
    "CsvParseError",
    "Dataset",
    "DofReport",
    "IS_COMPILED",
    "InvalidInputError",
    "InvalidStateError",
    "KernelMatrix",
    "KernelSpec",
    "KplsError",
    "KplsModel",
    "KplsPipeline",
    "KrylovMoments",
    "NearBreakdownError",
    "NumericalFailureError",
    "OracleInconclusiveError",
    "RitzGapReport",
    "Rng",
    "SelectionFailedError",
    "SelectionGrid",
    "SelectionReport",
    "SensitivityCache",
    "SingularMatrixError",
    "SymTridiagonal",
    "build_sensitivity_cache",
    "center",
    "center_targets",
    "centered_column",
    "chebyshev",
    "confidence_band",
    "dof_approx",
    "dof_exact",
    "estimate_sigma",
    "fit",
    "fit_kpls",
    "gmdl",
    "gram",
    "h_transpose_k",
    "jacobian_fd",
    "kernel_column",
    "kernel_eval",
    "krylov_moments",
    "load_csv",
    "load_model",
    "matvec",
    "normal_quantile",
    "predict",
    "predictive_stderr",
    "ritz_gap_bounds",
    "save_model",
    "select",
    "solve_upper",
    "symtri_eigenvalues",
    "synth_kinlike",
    "synth_polymix",
    "synth_sinc",
    "trace_powers",
    "tridiagonal_D",
]
