"""Pure/mixed state construction, validation, and Haar-uniform random sampling.

Mixed states of a given rank are drawn from the induced measure: a d x k
complex Ginibre matrix G gives G G† / Tr(G G†), which for k = 1 coincides
with the projector onto a Haar-random pure state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRankError, NotNormalizedError
from .linalg import adjoint, hermiticity_defect

# Identity of the PRNG behind every sampler; recorded in experiment metadata.
GENERATOR_NAME = "numpy.random.Generator(PCG64)"

PURE_NORM_ATOL = 1e-12
TRACE_ATOL = 1e-10
EIG_ATOL = 1e-10


def as_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Accept a seed or an existing generator; always return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def density_from_pure(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| for a normalized amplitude vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm_sq = float(np.sum(np.abs(psi) ** 2))
    if abs(norm_sq - 1.0) > PURE_NORM_ATOL:
        raise NotNormalizedError(f"|amplitudes|^2 sums to {norm_sq!r}, not 1")
    return np.outer(psi, np.conj(psi))


def sample_haar_pure(dim: int, rng: int | np.random.Generator | None = None) -> np.ndarray:
    """Haar-uniform pure state: normalized vector of i.i.d. complex Gaussians."""
    if dim < 2:
        raise InvalidRankError(f"dim must be >= 2, got {dim}")
    rng = as_rng(rng)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def sample_induced_mixed(
    dim: int, rank: int, rng: int | np.random.Generator | None = None
) -> np.ndarray:
    """Rank-`rank` state from the induced (Ginibre) measure: G G† / Tr(G G†)."""
    if not 1 <= rank <= dim:
        raise InvalidRankError(f"rank must satisfy 1 <= rank <= dim, got rank={rank} dim={dim}")
    rng = as_rng(rng)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ adjoint(g)
    return rho / np.trace(rho).real


def random_hermitian(dim: int, rng: int | np.random.Generator | None = None) -> np.ndarray:
    """Gaussian Hermitian matrix (GUE-like, unnormalized); handy for probes."""
    rng = as_rng(rng)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + adjoint(z)) / 2


def project_to_density(m: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix to a density operator.

    Eigenvalues are clipped at zero and the trace renormalized to 1.
    """
    m = np.asarray(m, dtype=complex)
    w, v = np.linalg.eigh((m + adjoint(m)) / 2)
    w = np.maximum(w, 0.0)
    s = np.sum(w)
    if s <= 0:
        w[-1] = 1.0
        s = 1.0
    return (v * (w / s)) @ adjoint(v)


@dataclass(frozen=True)
class StateDiagnostics:
    """Defect report for a candidate density matrix (reporting only)."""

    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def is_valid(self) -> bool:
        return (
            self.hermiticity_defect <= 100 * PURE_NORM_ATOL
            and abs(self.trace_defect) <= TRACE_ATOL
            and self.min_eigenvalue >= -EIG_ATOL
        )


def validate(rho: np.ndarray) -> StateDiagnostics:
    """Report Hermiticity defect, trace defect, and minimum eigenvalue of rho."""
    rho = np.asarray(rho, dtype=complex)
    herm = hermiticity_defect(rho)
    tr = float(np.trace(rho).real) - 1.0
    w = np.linalg.eigvalsh((rho + adjoint(rho)) / 2)
    return StateDiagnostics(hermiticity_defect=herm, trace_defect=tr, min_eigenvalue=float(w[0]))
