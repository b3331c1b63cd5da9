"""Exception types shared across the package."""


class KplsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(KplsError, ValueError):
    """Arguments violate an operation's preconditions."""


class InvalidStateError(KplsError):
    """Operation applied to an object in the wrong state, e.g. re-centering."""


class SingularMatrixError(KplsError):
    """A triangular solve hit a (near-)zero diagonal entry."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class NumericalFailureError(KplsError):
    """A computation produced non-finite intermediates."""


class NearBreakdownError(KplsError):
    """Krylov collinearity makes the requested component count unreliable."""


class OracleInconclusiveError(KplsError):
    """A finite-difference oracle could not be evaluated for this configuration."""


class CannotEstimateSigmaError(KplsError):
    """Residual degrees of freedom exhausted; pass the noise level explicitly."""


class SelectionFailedError(KplsError):
    """Every grid configuration failed; carries per-configuration diagnostics."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class CsvParseError(KplsError):
    """Malformed CSV input; carries the offending 1-based line (and column)."""

    def __init__(self, message: str, line: int, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class UsageError(KplsError):
    """Bad command line; the CLI exits with status 1 on this."""
