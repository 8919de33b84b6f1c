"""Dense complex linear algebra helpers for small Hermitian problems (d <= 16)."""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DimensionMismatchError, HermiticityWarning, NonHermitianInputError

# Absolute entrywise tolerance for accepting a matrix as Hermitian.
HERMITICITY_ATOL = 1e-12


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose (on the last two axes)."""
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_defect(a: np.ndarray) -> float:
    """max |A_ij - conj(A_ji)|."""
    return float(np.max(np.abs(a - adjoint(a)))) if a.size else 0.0


def is_hermitian(a: np.ndarray, atol: float = HERMITICITY_ATOL) -> bool:
    return a.shape[-1] == a.shape[-2] and hermiticity_defect(a) <= atol


def hermitian_part(a: np.ndarray, warn_atol: float = HERMITICITY_ATOL) -> np.ndarray:
    """Symmetrize (A + A†)/2, warning if the correction exceeds `warn_atol`."""
    a = np.asarray(a, dtype=complex)
    defect = hermiticity_defect(a)
    if defect > warn_atol:
        warnings.warn(
            f"input symmetrized; Hermiticity defect {defect:.3e} exceeds {warn_atol:.1e}",
            HermiticityWarning,
            stacklevel=2,
        )
    return (a + adjoint(a)) / 2


def assert_hermitian(a: np.ndarray, atol: float = HERMITICITY_ATOL, name: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if defect > atol:
        raise NonHermitianInputError(f"{name} has Hermiticity defect {defect:.3e} > {atol:.1e}")


def eigh(a: np.ndarray, atol: float = HERMITICITY_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvectors as columns).  Raises
    NonHermitianInputError if the input violates the Hermiticity tolerance.
    """
    a = np.asarray(a, dtype=complex)
    assert_hermitian(a, atol)
    w, v = np.linalg.eigh((a + adjoint(a)) / 2)
    return w, v


def trace_norm(a: np.ndarray, atol: float = HERMITICITY_ATOL) -> float:
    """Trace norm ||A||_1 = sum of |eigenvalues| for Hermitian A."""
    a = np.asarray(a, dtype=complex)
    assert_hermitian(a, atol)
    return float(np.sum(np.abs(np.linalg.eigvalsh((a + adjoint(a)) / 2))))
