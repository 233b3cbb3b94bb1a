"""Exception types shared across the package."""


class AttsimError(Exception):
    """Base class for all package errors."""


class DomainError(AttsimError):
    """Input outside the mathematical domain of an operation
    (representation singularity, non-positive scale parameter, ...)."""


class DegenerateInput(AttsimError):
    """Vector observation too close to zero to normalize (e.g. free fall)."""


class CovarianceError(AttsimError):
    """State error covariance lost positive semi-definiteness."""


class SingularInnovation(AttsimError):
    """Innovation covariance not invertible in a measurement update."""


class CholeskyError(AttsimError):
    """Matrix square root failed even after jitter."""


class QuaternionDivergence(AttsimError):
    """Sigma-point spread too large for the small-rotation recovery step."""


class EmptySeries(AttsimError):
    """Metrics requested for an empty error series."""


class TrajectoryError(AttsimError):
    """Base class for trajectory file problems."""


class ParseError(TrajectoryError):
    """Malformed trajectory file; carries line (and column) information."""

    def __init__(self, message, line, column=None):
        loc = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{loc}: {message}")
        self.line = line
        self.column = column


class ValidationError(TrajectoryError):
    """Well-formed file with physically invalid content."""


class ConfigError(AttsimError):
    """Bad harness configuration (maps to CLI exit code 2)."""
