"""System specification, energy evaluation, classification, and witnesses.

All energies are expressed in units of the detector threshold quantum, so the
default d-level ladder has level energies 0, 1, ..., d-1 and threshold 1
(zero detuning).  A state is free when its mean energy does not exceed the
threshold; the boundary of that half-space holds the edge states.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, WrongDimensionError
from .linalg import assert_hermitian

# Absolute slack on the energy margin used to call a state an edge state.
EPS_EDGE = 1e-9


@dataclass(frozen=True)
class SystemSpec:
    """Incoming-system level energies plus the detector threshold.

    `strict_inequality` switches to the convention in which edge states count
    as resourceful; it affects freeness predicates, not classification labels.
    """

    dim: int
    level_energies: tuple[float, ...] = field(default=())
    threshold: float = 1.0
    strict_inequality: bool = False

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        levels = self.level_energies or tuple(float(n) for n in range(self.dim))
        object.__setattr__(self, "level_energies", tuple(float(e) for e in levels))
        if len(self.level_energies) != self.dim:
            raise ValueError(
                f"expected {self.dim} level energies, got {len(self.level_energies)}"
            )
        if self.level_energies[0] != 0.0:
            raise ValueError("ground level energy must be 0")
        if any(a > b for a, b in zip(self.level_energies, self.level_energies[1:])):
            raise ValueError("level energies must be non-decreasing")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")

    @classmethod
    def default(cls, dim: int) -> "SystemSpec":
        """Equally spaced ladder with zero detuning: energies n, threshold 1."""
        return cls(dim=dim)

    @property
    def is_default_ladder(self) -> bool:
        return self.threshold == 1.0 and all(
            e == float(n) for n, e in enumerate(self.level_energies)
        )

    def hamiltonian(self) -> np.ndarray:
        return np.diag(np.asarray(self.level_energies, dtype=complex))

    def with_strict_inequality(self, strict: bool = True) -> "SystemSpec":
        return replace(self, strict_inequality=strict)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "level_energies": list(self.level_energies),
            "threshold": self.threshold,
            "strict_inequality": self.strict_inequality,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SystemSpec":
        return cls(
            dim=int(d["dim"]),
            level_energies=tuple(d.get("level_energies") or ()),
            threshold=float(d.get("threshold", 1.0)),
            strict_inequality=bool(d.get("strict_inequality", False)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SystemSpec":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


class Label(enum.Enum):
    FREE_INTERIOR = "FreeInterior"
    EDGE = "Edge"
    RESOURCEFUL = "Resourceful"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Classification:
    label: Label
    energy: float
    margin: float

    def counts_as_free(self, strict_inequality: bool = False) -> bool:
        if self.label is Label.FREE_INTERIOR:
            return True
        if self.label is Label.EDGE:
            return not strict_inequality
        return False


def energy(rho: np.ndarray, spec: SystemSpec) -> float:
    """Mean energy Tr(rho H) in threshold units."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (spec.dim, spec.dim):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {spec.dim}")
    return float(np.real(np.diag(rho) @ np.asarray(spec.level_energies)))


def classify(rho: np.ndarray, spec: SystemSpec, eps_edge: float = EPS_EDGE) -> Classification:
    """Free-interior / edge / resourceful split of a state by its energy margin."""
    e = energy(rho, spec)
    margin = e - spec.threshold
    if margin < -eps_edge:
        label = Label.FREE_INTERIOR
    elif margin <= eps_edge:
        label = Label.EDGE
    else:
        label = Label.RESOURCEFUL
    return Classification(label=label, energy=e, margin=margin)


def is_free_state(rho: np.ndarray, spec: SystemSpec, eps_edge: float = EPS_EDGE) -> bool:
    """Freeness under the spec's edge convention (edge states free by default)."""
    return classify(rho, spec, eps_edge).counts_as_free(spec.strict_inequality)


def witness(spec: SystemSpec) -> np.ndarray:
    """Hermitian W = H - threshold*I.

    Tr(W rho) <= 0 exactly on the free set (interior and edge); a positive
    value detects a resourceful state.  The free set is the intersection of
    the state set with a single half-space, so this one witness is complete.
    """
    return spec.hamiltonian() - spec.threshold * np.eye(spec.dim)


def witness_value(rho: np.ndarray, spec: SystemSpec) -> float:
    """Tr(W rho); equals the energy margin."""
    return energy(rho, spec) - spec.threshold


def mix_to_free(rho: np.ndarray, spec: SystemSpec) -> np.ndarray:
    """Pull a state into the free set by mixing toward the ground state.

    States over the threshold move along the straight line to |0><0| and
    land exactly on the edge; free states are returned unchanged.
    """
    rho = np.asarray(rho, dtype=complex)
    e = energy(rho, spec)
    if e <= spec.threshold:
        return rho
    t = spec.threshold / e
    out = t * rho
    out[0, 0] += 1.0 - t
    return out


def mix_to_free_batch(rhos: np.ndarray, spec: SystemSpec) -> np.ndarray:
    """Vectorized `mix_to_free` over a stack of states (modifies a copy)."""
    rhos = np.array(rhos, dtype=complex)
    levels = np.asarray(spec.level_energies)
    energies = np.real(np.einsum("nii,i->n", rhos, levels))
    t = np.where(energies > spec.threshold, spec.threshold / np.maximum(energies, 1e-300), 1.0)
    rhos *= t[:, None, None]
    rhos[:, 0, 0] += 1.0 - t
    return rhos


def random_free_states(
    spec: SystemSpec,
    n_samples: int,
    rng: int | np.random.Generator | None = None,
    ranks: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Stack of exactly free states: Ginibre draws pulled into the free set.

    Ranks cycle through `ranks` (default 1..dim).  The edge projection
    overweights the boundary, which is what probing free operations wants.
    """
    from .states import as_rng  # local import to keep module deps one-way

    rng = as_rng(rng)
    d = spec.dim
    ranks = ranks or tuple(range(1, d + 1))
    out = np.empty((n_samples, d, d), dtype=complex)
    counts = [n_samples // len(ranks)] * len(ranks)
    counts[-1] += n_samples - sum(counts)
    pos = 0
    for rank, cnt in zip(ranks, counts):
        g = rng.standard_normal((cnt, d, rank)) + 1j * rng.standard_normal((cnt, d, rank))
        rhos = g @ np.conj(np.swapaxes(g, -1, -2))
        rhos /= np.real(np.trace(rhos, axis1=1, axis2=2))[:, None, None]
        out[pos : pos + cnt] = rhos
        pos += cnt
    return mix_to_free_batch(out, spec)


def qutrit_pure_is_free(psi: np.ndarray, eps_edge: float = EPS_EDGE) -> bool:
    """Closed-form freeness of a three-level pure state: |c| <= |a|.

    Valid for the default equally spaced qutrit ladder, where the energy
    margin of a|0> + b|1> + c|2> is |c|^2 - |a|^2.  Edge slack is counted
    as free.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (3,):
        raise WrongDimensionError(f"expected a 3-level pure state, got shape {psi.shape}")
    return abs(psi[2]) ** 2 <= abs(psi[0]) ** 2 + eps_edge


def qutrit_mixed_is_free(rho: np.ndarray, eps_edge: float = EPS_EDGE) -> bool:
    """Closed-form freeness of a three-level state: rho_11 + 2*rho_22 <= 1.

    Diagonal elements are taken in the energy eigenbasis; valid for the
    default equally spaced qutrit ladder.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise WrongDimensionError(f"expected a 3x3 density matrix, got shape {rho.shape}")
    assert_hermitian(rho, atol=1e-10, name="state")
    return float(rho[1, 1].real + 2 * rho[2, 2].real) <= 1.0 + eps_edge
