"""Exception hierarchy for dqdcorr.

Each exception kind maps to one process exit code used by the CLI.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class DqdcorrError(Exception):
    """Base class for all dqdcorr errors."""

    exit_code = EXIT_USAGE


class InvalidParameterError(DqdcorrError, ValueError):
    """An input violates a precondition (temperature, angle, sweep spec, bracket)."""

    exit_code = EXIT_USAGE


class UnsupportedParameterError(InvalidParameterError):
    """An input is well-formed but outside what the engine supports (e.g. phi != 0)."""


class NumericalError(DqdcorrError, ArithmeticError):
    """Base class for numerical failures."""

    exit_code = EXIT_NUMERICAL


class NonSymmetricMatrixError(NumericalError):
    """Eigensolver input is not symmetric within tolerance."""

    def __init__(self, asymmetry: float, tolerance: float):
        super().__init__(
            f"Matrix is not symmetric: max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}"
        )
        self.asymmetry = asymmetry
        self.tolerance = tolerance


class ConvergenceError(NumericalError):
    """Iterative method did not converge."""

    def __init__(self, sweeps: int, residual: float):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.sweeps = sweeps
        self.residual = residual


class ConsistencyError(NumericalError):
    """Internal-consistency check failed; signals a model bug."""


class ValidationFailedError(NumericalError):
    """The analytic-vs-numeric validation report has failing categories."""


class OutputError(DqdcorrError, OSError):
    """Output could not be written."""

    exit_code = EXIT_IO

    def __init__(self, path: str, reason: str):
        super().__init__(f"Cannot write {path}: {reason}")
        self.path = path
        self.reason = reason
