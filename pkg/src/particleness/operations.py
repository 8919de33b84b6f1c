"""Verification of quantum operations against the free-state set.

A Kraus set {K_n} (complete: sum K†K = I) is a free operation when every
post-selected subset map keeps every free state free, i.e. the normalized
energy Tr(sum_S K rho K† H) / Tr(sum_S K rho K†) stays at or below the
threshold for all free rho and all nonempty index subsets S.  Each subset
objective is linear-fractional in rho, so its maximum over the (convex)
free set is found reliably by multistart projected-gradient ascent, and is
cross-checked against a large batch of random free-state probes.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompleteKrausSetError,
    TooManyKrausOperatorsError,
)
from .linalg import adjoint, hermitian_part
from .states import as_rng, project_to_density
from .system import SystemSpec, energy, mix_to_free, random_free_states

COMPLETENESS_ATOL = 1e-10
COMMUTATION_ATOL = 1e-10
MAX_KRAUS_OPERATORS = 12


def completeness_defect(kraus: list[np.ndarray]) -> float:
    """max |sum K†K - I|; zero for a trace-preserving set."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    d = ks[0].shape[0]
    acc = np.zeros((d, d), dtype=complex)
    for k in ks:
        acc += adjoint(k) @ k
    return float(np.max(np.abs(acc - np.eye(d))))


def assert_complete(kraus: list[np.ndarray], atol: float = COMPLETENESS_ATOL) -> None:
    if not kraus:
        raise IncompleteKrausSetError("empty Kraus set")
    defect = completeness_defect(kraus)
    if defect > atol:
        raise IncompleteKrausSetError(
            f"completeness defect {defect:.3e} exceeds {atol:.1e}"
        )


def apply_channel(kraus: list[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """sum_n K_n rho K_n†."""
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for k in kraus:
        out += k @ rho @ adjoint(k)
    return out


def apply_subset_map(
    kraus: list[np.ndarray], indices: tuple[int, ...], rho: np.ndarray
) -> tuple[np.ndarray, float]:
    """Unnormalized post-selected map for an index subset plus its probability."""
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for i in indices:
        out += kraus[i] @ rho @ adjoint(kraus[i])
    return out, float(np.trace(out).real)


def commutes_with_hamiltonian(
    kraus: list[np.ndarray], spec: SystemSpec, atol: float = COMMUTATION_ATOL
) -> bool:
    """True when every operator commutes with H entrywise within `atol`."""
    assert_complete(kraus)
    h = spec.hamiltonian()
    return all(
        float(np.max(np.abs(k @ h - h @ k))) <= atol for k in kraus
    )


def is_energy_invariant(
    kraus: list[np.ndarray],
    spec: SystemSpec,
    n_probe: int = 200,
    rng=None,
    atol_algebraic: float = 1e-10,
    atol_probe: float = 1e-9,
) -> bool:
    """Whether the full channel preserves mean energy on free states.

    The algebraic condition sum K†HK = H is decisive; the random free-state
    probes are a consistency diagnostic folded into the same verdict.
    """
    assert_complete(kraus)
    h = spec.hamiltonian()
    acc = np.zeros_like(h)
    for k in kraus:
        acc += adjoint(k) @ h @ k
    if float(np.max(np.abs(acc - h))) > atol_algebraic:
        return False
    probes = random_free_states(spec, n_probe, rng)
    for rho in probes:
        if abs(energy(apply_channel(kraus, rho), spec) - energy(rho, spec)) > atol_probe:
            return False
    return True


class Verdict(enum.Enum):
    FREE = "Free"
    NOT_FREE = "NotFree"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SubsetResult:
    indices: tuple[int, ...]
    max_energy: float
    argmax_state: np.ndarray | None
    post_probability: float
    skipped: bool = False


@dataclass(frozen=True)
class FreeOpVerdict:
    verdict: Verdict
    worst_state: np.ndarray | None
    worst_energy: float
    worst_subset: tuple[int, ...] | None
    subsets: list[SubsetResult] = field(default_factory=list)
    used_commutation_fast_path: bool = False


def _subset_operators(
    kraus: list[np.ndarray], h: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    num = [adjoint(k) @ h @ k for k in kraus]
    den = [adjoint(k) @ k for k in kraus]
    return num, den


def _fractional_value(rho, m_op, n_op) -> tuple[float, float]:
    num = float(np.real(np.einsum("ij,ji->", rho, m_op)))
    den = float(np.real(np.einsum("ij,ji->", rho, n_op)))
    return num, den


def _ascend_subset(
    m_op: np.ndarray,
    n_op: np.ndarray,
    spec: SystemSpec,
    starts: list[np.ndarray],
    n_iter: int,
    prob_floor: float,
) -> tuple[float, np.ndarray | None, float]:
    """Projected-gradient ascent of <rho,M>/<rho,N> over the free set."""
    best_val, best_rho, best_prob = -np.inf, None, 0.0
    for rho in starts:
        num, den = _fractional_value(rho, m_op, n_op)
        if den < prob_floor:
            continue
        val = num / den
        step = 0.5
        for _ in range(n_iter):
            grad = (m_op - val * n_op) / den
            cand = mix_to_free(project_to_density(rho + step * grad), spec)
            c_num, c_den = _fractional_value(cand, m_op, n_op)
            if c_den >= prob_floor and c_num / c_den > val:
                rho, val, den = cand, c_num / c_den, c_den
                step = min(1.0, step * 1.2)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if val > best_val:
            num, den = _fractional_value(rho, m_op, n_op)
            best_val, best_rho, best_prob = val, rho, den
    return best_val, best_rho, best_prob


def is_free_operation(
    kraus: list[np.ndarray],
    spec: SystemSpec,
    n_probes: int = 10_000,
    n_starts: int = 6,
    n_ascent_iter: int = 200,
    tol_violation: float = 1e-8,
    tol_disagree: float = 1e-6,
    prob_floor: float = 1e-12,
    commuting_fast_path: bool = True,
    rng=None,
) -> FreeOpVerdict:
    """Check Eq.-style subset freeness of a complete Kraus set.

    Every nonempty index subset is maximized independently; the verdict is
    Free only if no subset can push a free state's normalized post-energy
    above threshold + `tol_violation`.  Subsets whose post-selection
    probability vanishes at the candidate maximizer are recorded as skipped.
    Kraus sets commuting with H short-circuit to Free (their full channel
    is energy invariant); pass `commuting_fast_path=False` to force the
    subset-by-subset analysis.
    """
    assert_complete(kraus)
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    if len(kraus) > MAX_KRAUS_OPERATORS:
        raise TooManyKrausOperatorsError(
            f"subset enumeration supports at most {MAX_KRAUS_OPERATORS} operators, got {len(kraus)}"
        )
    if commuting_fast_path and commutes_with_hamiltonian(kraus, spec):
        return FreeOpVerdict(
            verdict=Verdict.FREE,
            worst_state=None,
            worst_energy=-np.inf,
            worst_subset=None,
            used_commutation_fast_path=True,
        )

    rng = as_rng(rng)
    h = spec.hamiltonian()
    num_ops, den_ops = _subset_operators(kraus, h)
    probes = random_free_states(spec, n_probes, rng)

    subsets: list[SubsetResult] = []
    worst = (-np.inf, None, None)  # value, state, subset
    inconclusive = False
    for r in range(1, len(kraus) + 1):
        for combo in itertools.combinations(range(len(kraus)), r):
            m_op = hermitian_part(sum(num_ops[i] for i in combo), warn_atol=np.inf)
            n_op = hermitian_part(sum(den_ops[i] for i in combo), warn_atol=np.inf)
            if float(np.max(np.abs(n_op))) < prob_floor:
                subsets.append(
                    SubsetResult(combo, -np.inf, None, 0.0, skipped=True)
                )
                continue

            nums = np.real(np.einsum("nij,ji->n", probes, m_op))
            dens = np.real(np.einsum("nij,ji->n", probes, n_op))
            ok = dens >= prob_floor
            probe_vals = np.where(ok, nums / np.where(ok, dens, 1.0), -np.inf)
            i_best = int(np.argmax(probe_vals))
            probe_best = float(probe_vals[i_best])

            starts = [probes[i] for i in rng.choice(len(probes), size=n_starts - 1)]
            starts.append(probes[i_best])
            val, arg, prob = _ascend_subset(
                m_op, n_op, spec, starts, n_ascent_iter, prob_floor
            )

            if probe_best > val + tol_disagree:
                # ascent missed the probe optimum; restart from it once
                val2, arg2, prob2 = _ascend_subset(
                    m_op, n_op, spec, [probes[i_best]], n_ascent_iter, prob_floor
                )
                if val2 >= probe_best - tol_disagree:
                    val, arg, prob = val2, arg2, prob2
                else:
                    inconclusive = True
                    val, arg, prob = probe_best, probes[i_best], float(dens[i_best])

            if prob < prob_floor:
                subsets.append(SubsetResult(combo, val, arg, prob, skipped=True))
                continue
            subsets.append(SubsetResult(combo, val, arg, prob))
            if val > worst[0]:
                worst = (val, arg, combo)

    if worst[0] > spec.threshold + tol_violation:
        return FreeOpVerdict(
            verdict=Verdict.NOT_FREE,
            worst_state=worst[1],
            worst_energy=worst[0],
            worst_subset=worst[2],
            subsets=subsets,
        )
    if inconclusive:
        return FreeOpVerdict(
            verdict=Verdict.INCONCLUSIVE,
            worst_state=worst[1],
            worst_energy=worst[0],
            worst_subset=worst[2],
            subsets=subsets,
        )
    return FreeOpVerdict(
        verdict=Verdict.FREE,
        worst_state=worst[1],
        worst_energy=worst[0],
        worst_subset=worst[2],
        subsets=subsets,
    )


def random_commuting_kraus(
    spec: SystemSpec,
    n_operators: int = 3,
    rng=None,
) -> list[np.ndarray]:
    """Random complete Kraus set commuting with H (diagonal operators).

    For a nondegenerate spectrum the commutant is the diagonal algebra, so
    these are general dephasing-like channels.
    """
    rng = as_rng(rng)
    d = spec.dim
    z = rng.standard_normal((n_operators, d)) + 1j * rng.standard_normal((n_operators, d))
    z /= np.sqrt(np.sum(np.abs(z) ** 2, axis=0))[None, :]
    return [np.diag(z[n]) for n in range(n_operators)]
