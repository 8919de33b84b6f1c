"""Trace-norm distance measures to the free set and to the incoherent states.

Both measures solve  min ||rho - sigma||_1  over a convex set of states:
the free set (energy at most the threshold) for the particle measure, the
diagonal states for the coherence measure.  The minimization is reformulated
with a positive/negative split P - Q = rho - sigma and handed to the conic
interior-point core; independent stochastic/grid oracles provide the
cross-check route and never share code with the solver path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotResourcefulError,
    WrongDimensionError,
    WrongSpecError,
)
from .linalg import adjoint, hermitian_part, trace_norm
from .solver import ConicProgram, hermitian_basis, solve_conic, svec
from .states import as_rng, density_from_pure
from .system import (
    EPS_EDGE,
    SystemSpec,
    classify,
    energy,
    mix_to_free,
    mix_to_free_batch,
    qutrit_pure_is_free,
)


@dataclass(frozen=True)
class Certificate:
    """How a measure value was obtained and how tightly it is certified."""

    method: str
    gap: float
    iterations: int
    oracle_gap: float | None = None


@dataclass(frozen=True)
class MeasureResult:
    value: float
    optimizer: np.ndarray
    certificate: Certificate


@dataclass(frozen=True)
class BoundReport:
    lemma_bound: float
    witness_lower: float
    line_bound: float | None = None


# ---------------------------------------------------------------------------
# Conic program builders
# ---------------------------------------------------------------------------

def _particleness_program(rho: np.ndarray, hamiltonian: np.ndarray, threshold: float) -> ConicProgram:
    """min Tr(P+Q) s.t. P - Q + sigma = rho, Tr sigma = 1, <H,sigma> + s = w."""
    d = rho.shape[0]
    bas = hermitian_basis(d)
    m = d * d + 2
    a_herm = np.zeros((m, 3, d, d), dtype=complex)
    a_lin = np.zeros((m, 1))
    b = np.zeros(m)
    a_herm[: d * d, 0] = bas
    a_herm[: d * d, 1] = -bas
    a_herm[: d * d, 2] = bas
    b[: d * d] = svec(rho)
    a_herm[d * d, 2] = np.eye(d)
    b[d * d] = 1.0
    a_herm[d * d + 1, 2] = hamiltonian
    a_lin[d * d + 1, 0] = 1.0
    b[d * d + 1] = threshold
    eye = np.eye(d, dtype=complex)
    c_herm = np.stack([eye, eye, np.zeros((d, d), dtype=complex)])
    return ConicProgram(a_herm=a_herm, a_lin=a_lin, b=b, c_herm=c_herm, c_lin=np.zeros(1))


def _coherence_program(rho: np.ndarray) -> ConicProgram:
    """min Tr(P+Q) s.t. P - Q + diag(t) = rho, sum t = 1, t >= 0."""
    d = rho.shape[0]
    bas = hermitian_basis(d)
    m = d * d + 1
    a_herm = np.zeros((m, 2, d, d), dtype=complex)
    a_lin = np.zeros((m, d))
    b = np.zeros(m)
    a_herm[: d * d, 0] = bas
    a_herm[: d * d, 1] = -bas
    a_lin[:d, :] = np.eye(d)
    b[: d * d] = svec(rho)
    a_lin[d * d, :] = 1.0
    b[d * d] = 1.0
    eye = np.eye(d, dtype=complex)
    c_herm = np.stack([eye, eye])
    return ConicProgram(a_herm=a_herm, a_lin=a_lin, b=b, c_herm=c_herm, c_lin=np.zeros(d))


def _cleanup_state(sigma: np.ndarray) -> np.ndarray:
    sigma = hermitian_part(sigma, warn_atol=np.inf)
    return sigma / np.trace(sigma).real


# ---------------------------------------------------------------------------
# Exact solvers
# ---------------------------------------------------------------------------

def particleness_trace(
    rho: np.ndarray,
    spec: SystemSpec,
    gap_tol: float = 1e-9,
    eps_edge: float = EPS_EDGE,
    cross_check: bool = False,
    rng=None,
) -> MeasureResult:
    """Minimal trace-norm distance from `rho` to the free set.

    Returns 0 with the input as optimizer when `rho` is already free within
    `eps_edge`.  With `cross_check` the stochastic oracle runs alongside and
    the certificate records the disagreement.
    """
    rho = hermitian_part(np.asarray(rho, dtype=complex))
    cls = classify(rho, spec, eps_edge)
    if cls.margin <= eps_edge:
        oracle_gap = None
        if cross_check:
            oracle_gap = particleness_oracle(rho, spec, rng=rng)[0]
        return MeasureResult(
            0.0, rho, Certificate("free-shortcut", 0.0, 0, oracle_gap)
        )

    prog = _particleness_program(rho, spec.hamiltonian(), spec.threshold)
    res = solve_conic(prog, gap_tol=gap_tol)
    sigma = _cleanup_state(res.x_herm[2])
    value = trace_norm(rho - sigma)
    oracle_gap = None
    if cross_check:
        oracle_value, _ = particleness_oracle(rho, spec, rng=rng)
        oracle_gap = abs(value - oracle_value)
    return MeasureResult(
        value=value,
        optimizer=sigma,
        certificate=Certificate("interior-point", res.gap, res.iterations, oracle_gap),
    )


def coherence_trace(
    rho: np.ndarray,
    gap_tol: float = 1e-9,
    cross_check: bool = False,
    rng=None,
) -> MeasureResult:
    """Minimal trace-norm distance from `rho` to the diagonal states."""
    rho = hermitian_part(np.asarray(rho, dtype=complex))
    d = rho.shape[0]
    off = rho - np.diag(np.diag(rho))
    if np.max(np.abs(off)) <= 1e-12:
        oracle_gap = None
        if cross_check:
            oracle_gap = coherence_oracle(rho, rng=rng)[0]
        return MeasureResult(
            0.0, np.diag(np.diag(rho)), Certificate("diagonal-shortcut", 0.0, 0, oracle_gap)
        )

    res = solve_conic(_coherence_program(rho), gap_tol=gap_tol)
    t = np.maximum(res.x_lin, 0.0)
    sigma = np.diag(t / np.sum(t)).astype(complex)
    value = trace_norm(rho - sigma)
    oracle_gap = None
    if cross_check:
        oracle_value, _ = coherence_oracle(rho, rng=rng)
        oracle_gap = abs(value - oracle_value)
    return MeasureResult(
        value=value,
        optimizer=sigma,
        certificate=Certificate("interior-point", res.gap, res.iterations, oracle_gap),
    )


# ---------------------------------------------------------------------------
# Independent oracles (cross-check route; no interior-point code involved)
# ---------------------------------------------------------------------------

def particleness_oracle(
    rho: np.ndarray,
    spec: SystemSpec,
    n_samples: int = 100_000,
    n_refine: int = 1000,
    rng=None,
    batch: int = 16,
) -> tuple[float, np.ndarray]:
    """Stochastic upper-bound oracle for the particle measure.

    Draws Ginibre states of every rank, projects them onto the free set by
    mixing toward the ground state, keeps the best (also seeding with the
    edge projection of `rho` itself), then descends with `n_refine` rounds
    of random Hermitian perturbations at an adaptively shrinking step,
    `batch` proposals per round.  Returns (value, sigma).
    """
    rng = as_rng(rng)
    rho = np.asarray(rho, dtype=complex)
    d = spec.dim
    best_val = np.inf
    best_sigma = None
    per_rank = max(1, n_samples // d)
    for rank in range(1, d + 1):
        g = rng.standard_normal((per_rank, d, rank)) + 1j * rng.standard_normal(
            (per_rank, d, rank)
        )
        sigmas = g @ adjoint(g)
        traces = np.real(np.trace(sigmas, axis1=1, axis2=2))
        sigmas /= traces[:, None, None]
        sigmas = mix_to_free_batch(sigmas, spec)
        dists = np.sum(np.abs(np.linalg.eigvalsh(rho[None] - sigmas)), axis=1)
        i = int(np.argmin(dists))
        if dists[i] < best_val:
            best_val = float(dists[i])
            best_sigma = sigmas[i]

    seed = mix_to_free(rho, spec)
    seed_val = trace_norm(rho - seed)
    if seed_val < best_val:
        best_val, best_sigma = seed_val, seed

    # Local refinement: random Hermitian perturbations with adaptive step.
    sigma = best_sigma
    step = 0.15
    idx = np.arange(d)
    for _ in range(n_refine):
        h = rng.standard_normal((batch, d, d)) + 1j * rng.standard_normal((batch, d, d))
        cands = sigma[None] + step * (h + adjoint(h)) / 2
        w, v = np.linalg.eigh((cands + adjoint(cands)) / 2)
        w = np.maximum(w, 0.0)
        s = np.sum(w, axis=1)
        s[s <= 0] = 1.0
        cands = np.einsum("bik,bk,bjk->bij", v, w / s[:, None], np.conj(v))
        cands = mix_to_free_batch(cands, spec)
        dists = np.sum(np.abs(np.linalg.eigvalsh(rho[None] - cands)), axis=1)
        i = int(np.argmin(dists))
        if dists[i] < best_val:
            best_val, sigma = float(dists[i]), cands[i]
            step = min(0.5, step * 1.3)
        else:
            step = max(1e-8, step * 0.9)
    return best_val, sigma


def _simplex_grid(d: int, step: float) -> np.ndarray:
    """All probability vectors on the regular grid with spacing `step`."""
    n = int(round(1.0 / step))
    if d == 2:
        t0 = np.linspace(0.0, 1.0, n + 1)
        return np.stack([t0, 1.0 - t0], axis=1)
    if d == 3:
        pts = []
        for i in range(n + 1):
            j = np.arange(n + 1 - i)
            t0 = np.full_like(j, i, dtype=float) / n
            t1 = j / n
            pts.append(np.stack([t0, t1, 1.0 - t0 - t1], axis=1))
        return np.concatenate(pts, axis=0)
    raise WrongDimensionError(f"simplex grid oracle supports d <= 3, got d={d}")


def coherence_oracle(
    rho: np.ndarray,
    step: float = 5e-3,
    refine_rounds: int = 3,
    rng=None,
) -> tuple[float, np.ndarray]:
    """Grid-search oracle over diagonal states (d <= 3), with grid refinement.

    For larger dimensions falls back to Dirichlet sampling plus the same
    adaptive descent used by the particle oracle.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if d <= 3:
        pts = _simplex_grid(d, step)
        diffs = np.repeat(rho[None], len(pts), axis=0)
        idx = np.arange(d)
        diffs[:, idx, idx] -= pts
        dists = np.sum(np.abs(np.linalg.eigvalsh(diffs)), axis=1)
        i = int(np.argmin(dists))
        best_t, best_val = pts[i], float(dists[i])
        width = step
        for _ in range(refine_rounds):
            # shrink a regular sub-grid around the incumbent
            offsets = np.linspace(-width, width, 11)
            if d == 2:
                t0 = np.clip(best_t[0] + offsets, 0.0, 1.0)
                cand = np.stack([t0, 1.0 - t0], axis=1)
            else:
                g0, g1 = np.meshgrid(offsets, offsets)
                t0 = np.clip(best_t[0] + g0.ravel(), 0.0, 1.0)
                t1 = np.clip(best_t[1] + g1.ravel(), 0.0, 1.0)
                keep = t0 + t1 <= 1.0
                cand = np.stack([t0[keep], t1[keep], 1.0 - t0[keep] - t1[keep]], axis=1)
            diffs = np.repeat(rho[None], len(cand), axis=0)
            diffs[:, idx, idx] -= cand
            dists = np.sum(np.abs(np.linalg.eigvalsh(diffs)), axis=1)
            i = int(np.argmin(dists))
            if dists[i] < best_val:
                best_val, best_t = float(dists[i]), cand[i]
            width /= 5.0
        return best_val, np.diag(best_t).astype(complex)

    rng = as_rng(rng)
    samples = rng.dirichlet(np.ones(d), size=20_000)
    diffs = np.repeat(rho[None], len(samples), axis=0)
    idx = np.arange(d)
    diffs[:, idx, idx] -= samples
    dists = np.sum(np.abs(np.linalg.eigvalsh(diffs)), axis=1)
    i = int(np.argmin(dists))
    best_t, best_val = samples[i], float(dists[i])
    step_sz = 0.1
    for _ in range(2000):
        cand = np.maximum(best_t + step_sz * rng.standard_normal(d), 0.0)
        s = cand.sum()
        if s <= 0:
            continue
        cand /= s
        val = float(np.sum(np.abs(np.linalg.eigvalsh(rho - np.diag(cand)))))
        if val < best_val:
            best_val, best_t = val, cand
            step_sz = min(0.5, step_sz * 1.3)
        else:
            step_sz = max(1e-8, step_sz * 0.92)
    return best_val, np.diag(best_t).astype(complex)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _require_default_ladder(spec: SystemSpec, what: str) -> None:
    if not spec.is_default_ladder:
        raise WrongSpecError(f"{what} requires the default equally spaced spec")


def lemma_upper_bound(
    rho: np.ndarray,
    spec: SystemSpec,
    distance: Callable[[np.ndarray], float] | None = None,
) -> float:
    """Distance to the fixed edge state diag(1/3, 1/3, 1/3, 0, ..., 0).

    That state has energy exactly at the threshold for the default ladder,
    so its distance upper-bounds the particle measure.  `distance` defaults
    to the trace norm of the difference.
    """
    _require_default_ladder(spec, "lemma_upper_bound")
    if spec.dim < 3:
        raise WrongDimensionError("lemma_upper_bound requires dim >= 3")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (spec.dim, spec.dim):
        raise DimensionMismatchError(f"state shape {rho.shape} vs dim {spec.dim}")
    pi = np.zeros((spec.dim, spec.dim), dtype=complex)
    pi[0, 0] = pi[1, 1] = pi[2, 2] = 1.0 / 3.0
    dist = distance if distance is not None else trace_norm
    return float(dist(rho - pi))


def _default_p_grid() -> np.ndarray:
    return np.concatenate([np.arange(0.01, 1.0, 0.01), [1.0]])


def line_upper_bound(
    psi: np.ndarray,
    spec: SystemSpec,
    p_grid: Sequence[float] | None = None,
    eps_edge: float = EPS_EDGE,
) -> float:
    """Upper bound for resourceful pure qutrits via edge states on the line
    toward the ground-level mixture p|0><0| + (1-p)|1><1|.

    For each p the mixing weight q_p = (|c|^2-|a|^2) / (p + |c|^2-|a|^2)
    lands exactly on the edge; the bound is the best distance over the grid,
    locally refined around the incumbent.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (3,):
        raise WrongDimensionError(f"expected a 3-level pure state, got shape {psi.shape}")
    _require_default_ladder(spec, "line_upper_bound")
    if qutrit_pure_is_free(psi, eps_edge):
        raise NotResourcefulError("line bound is defined for resourceful pure states only")

    rho = density_from_pure(psi)
    delta = abs(psi[2]) ** 2 - abs(psi[0]) ** 2
    grid = np.asarray(p_grid if p_grid is not None else _default_p_grid(), dtype=float)

    def eval_points(ps: np.ndarray) -> tuple[float, float]:
        best = (np.inf, np.nan)
        for p in ps:
            q = delta / (p + delta)
            mix = np.zeros((3, 3), dtype=complex)
            mix[0, 0] = p
            mix[1, 1] = 1.0 - p
            state = q * mix + (1.0 - q) * rho
            if abs(energy(state, spec) - spec.threshold) > 1e-9:
                raise WrongSpecError("line construction left the edge; spec not supported")
            dist = trace_norm(rho - state)
            if dist < best[0]:
                best = (dist, p)
        return best

    best_val, best_p = eval_points(grid)
    width = float(np.min(np.diff(np.sort(grid)))) if len(grid) > 1 else 0.1
    for _ in range(3):
        local = np.clip(np.linspace(best_p - width, best_p + width, 11), 1e-9, 1.0)
        val, p = eval_points(local)
        if val < best_val:
            best_val, best_p = val, p
        width /= 5.0
    return best_val


def witness_lower_bound(rho: np.ndarray, spec: SystemSpec) -> float:
    """Energy-margin lower bound max(0, (Tr(rho H) - w) / ||H - c I||_inf).

    The centering c = (max level)/2 minimizes the sup norm for the default
    ladder; Hoelder duality then bounds any trace-norm distance to the free
    set from below.
    """
    _require_default_ladder(spec, "witness_lower_bound")
    e = energy(rho, spec)
    half_span = (spec.dim - 1) / 2.0
    return max(0.0, (e - spec.threshold) / half_span)


def bound_report(
    rho: np.ndarray,
    spec: SystemSpec,
    psi: np.ndarray | None = None,
    eps_edge: float = EPS_EDGE,
) -> BoundReport:
    """Bundle the bounds; the line bound needs the pure amplitudes of `rho`."""
    line = None
    if psi is not None and not qutrit_pure_is_free(psi, eps_edge):
        line = line_upper_bound(psi, spec, eps_edge=eps_edge)
    return BoundReport(
        lemma_bound=lemma_upper_bound(rho, spec),
        witness_lower=witness_lower_bound(rho, spec),
        line_bound=line,
    )


def complementarity_value(
    rho: np.ndarray,
    spec: SystemSpec,
    a: float = 1.3,
    gap_tol: float = 1e-9,
) -> float:
    """particleness + a * coherence for a qutrit on the default ladder.

    Both terms are the raw trace-norm measures.  Note that the empirical
    bounding line of the scan experiments applies to the trace-distance
    particle coordinate (half this particleness term); see
    `experiments.bound_lhs`.
    """
    if spec.dim != 3:
        raise WrongDimensionError("complementarity_value is defined for qutrits")
    _require_default_ladder(spec, "complementarity_value")
    p = particleness_trace(rho, spec, gap_tol=gap_tol).value
    c = coherence_trace(rho, gap_tol=gap_tol).value
    return p + a * c
