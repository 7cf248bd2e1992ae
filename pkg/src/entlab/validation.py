"""Validation result types and density-matrix checks.

Checks return a `ValidationResult` listing every violated property instead of
raising on the first one, so callers can report all issues at once.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

# Tolerances for accepting a matrix as a quantum state
STATE_TRACE_TOL = 1e-10
STATE_PSD_TOL = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass
class ValidationResult:
    """Result of a validation operation.

    Attributes:
        is_valid: True if validation passed, False otherwise.
        errors: List of specific error messages if validation failed.
    """

    is_valid: bool
    errors: list[str] = field(default_factory=list)


def validate_density_matrix(
    rho: NDArray[np.complex128],
    trace_tol: float = STATE_TRACE_TOL,
    psd_tol: float = STATE_PSD_TOL,
) -> ValidationResult:
    """Validate that a matrix is a density matrix.

    A valid density matrix is square, Hermitian, positive semidefinite and
    has unit trace.

    Args:
        rho: Candidate matrix.
        trace_tol: Allowed deviation of the trace from 1.
        psd_tol: Allowed negative eigenvalue magnitude.

    Returns:
        ValidationResult with one message per violated property.
    """
    errors: list[str] = []

    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        errors.append(f"Matrix is not square: shape {rho.shape}")
        return ValidationResult(is_valid=False, errors=errors)

    deviation = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    if deviation > HERMITIAN_TOL:
        errors.append(f"Matrix is not Hermitian (max deviation {deviation:.3g})")
        return ValidationResult(is_valid=False, errors=errors)

    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > trace_tol:
        errors.append(f"Trace is {trace:.12g}, expected 1")

    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -psd_tol:
        errors.append(f"Matrix is not positive semidefinite (min eigenvalue {min_eig:.3g})")

    return ValidationResult(is_valid=len(errors) == 0, errors=errors)
