"""Exception types and error formatting for entlab.

Library code raises the `EntlabError` subclasses below; the CLI boundary turns
them (and Pydantic/YAML/OS errors) into one clean message plus an exit code.
"""

from collections.abc import Iterable

import yaml
from pydantic import ValidationError

from entlab import cli_logger, exit_codes


class EntlabError(Exception):
    """Base class for all domain errors raised by entlab."""


class DimensionError(EntlabError):
    """Raised when dimensions, party indices or size caps are violated."""

    def __init__(self, message: str) -> None:
        """Initialize with a description of the violated constraint."""
        self.detail = message
        super().__init__(message)


class PartyIndexError(DimensionError):
    """Raised when a party index lies outside 1..n."""

    def __init__(self, parties: Iterable[int], n: int) -> None:
        """Initialize with the offending party selection and party count."""
        self.parties = tuple(parties)
        self.n = n
        super().__init__(f"Invalid party selection {self.parties} for {n} parties (valid: 1..{n})")


class SizeCapError(DimensionError):
    """Raised when a problem exceeds a declared dimension cap."""

    def __init__(self, operation: str, d: int, cap: int) -> None:
        """Initialize with the operation name, requested and maximal dimension."""
        self.operation = operation
        self.d = d
        self.cap = cap
        super().__init__(f"{operation} supports local dimension d <= {cap}, got d = {d}")


class NotHermitianError(EntlabError):
    """Raised when an operation requires a Hermitian operator."""

    def __init__(self, deviation: float, tol: float) -> None:
        """Initialize with the measured deviation from hermiticity."""
        self.deviation = deviation
        self.tol = tol
        super().__init__(f"Operator is not Hermitian: max |A - A^H| = {deviation:.3g} > {tol:g}")


class InvalidStateError(EntlabError):
    """Raised when a vector or matrix is not a valid quantum state."""

    def __init__(self, reason: str, errors: list[str] | None = None) -> None:
        """Initialize with a short reason and optional detailed findings."""
        self.reason = reason
        self.errors = errors or []
        message = reason
        if self.errors:
            message += ": " + "; ".join(self.errors)
        super().__init__(message)


class UnsupportedCombinationError(EntlabError):
    """Raised when an option combination has no implementation."""

    def __init__(self, what: str, value: object, supported: Iterable[object]) -> None:
        """Initialize with the option name, its value and the supported values."""
        self.what = what
        self.value = value
        self.supported = tuple(supported)
        allowed = ", ".join(str(s) for s in self.supported)
        super().__init__(f"Unsupported {what} {value!r} (supported: {allowed})")


class EmptyResultError(EntlabError):
    """Raised when there is nothing to emit."""

    def __init__(self, what: str) -> None:
        """Initialize with a description of the empty result."""
        self.what = what
        super().__init__(f"{what} is empty; nothing written")


class SolverError(EntlabError):
    """Raised when the SDP solver breaks down numerically."""


class NotConvergedError(EntlabError):
    """Raised when an iterative method stops before reaching its tolerance."""

    def __init__(self, method: str, iterations: int, residual: float) -> None:
        """Initialize with the method name, iteration count and final residual."""
        self.method = method
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"{method} did not converge after {iterations} iterations (residual {residual:.3g})"
        )


def format_validation_errors(error: ValidationError) -> str:
    """Format Pydantic ValidationError into clean, user-friendly message.

    Removes Pydantic-specific URLs and technical jargon, producing a message
    suitable for CLI output.

    Args:
        error: The Pydantic ValidationError to format.

    Returns:
        A clean, human-readable error message.
    """
    messages = []

    for err in error.errors():
        loc = ".".join(str(part) for part in err["loc"])
        error_type = err["type"]
        msg = err["msg"]

        if error_type == "missing":
            messages.append(f"'{loc}': field is required")
        elif error_type == "extra_forbidden":
            messages.append(f"'{loc}': unknown field")
        elif error_type in ("int_type", "int_parsing"):
            messages.append(f"'{loc}': expected integer")
        elif error_type in ("float_type", "float_parsing"):
            messages.append(f"'{loc}': expected number")
        elif error_type == "greater_than":
            messages.append(f"'{loc}': must be greater than {err['ctx']['gt']}")
        else:
            # "Value error, d must be >= 2" -> "d must be >= 2"
            clean_msg = msg.removeprefix("Value error, ").lower()
            messages.append(f"'{loc}': {clean_msg}")

    if len(messages) == 1:
        return messages[0]

    return "; ".join(messages)


def handle_cli_error(error: Exception) -> int:
    """Handle an unhandled exception at the CLI boundary.

    Formats the error into a clean user-friendly message and returns
    an appropriate exit code, so raw tracebacks never reach the user.

    Args:
        error: The exception to handle.

    Returns:
        An exit code from exit_codes.
    """
    if isinstance(error, NotConvergedError):
        cli_logger.error(str(error))
        return exit_codes.NOT_CONVERGED

    if isinstance(error, EntlabError):
        cli_logger.error(str(error))
        return exit_codes.DOMAIN_ERROR

    if isinstance(error, ValidationError):
        cli_logger.error(f"Invalid configuration: {format_validation_errors(error)}")
        return exit_codes.DOMAIN_ERROR

    if isinstance(error, OSError):
        if error.filename:
            cli_logger.error(f"{error.strerror}: {error.filename}")
        else:
            cli_logger.error(str(error))
        return exit_codes.DOMAIN_ERROR

    if isinstance(error, yaml.YAMLError):
        cli_logger.error(f"Invalid YAML: {error}")
        return exit_codes.DOMAIN_ERROR

    if isinstance(error, ValueError):
        cli_logger.error(str(error))
        return exit_codes.DOMAIN_ERROR

    cli_logger.error(f"Unexpected error: {error}")
    return exit_codes.DOMAIN_ERROR
