"""JSON formats for states, Kraus sets, and measure results.

Complex numbers are serialized as [re, im] pairs throughout; matrices are
row-major nested lists of pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .measures import BoundReport, MeasureResult
from .states import density_from_pure, validate


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def json_to_matrix(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def vector_to_json(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def json_to_vector(pairs: list) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def load_state(path: str | Path) -> tuple[str, np.ndarray]:
    """Read a state file; returns ("pure", amplitudes) or ("mixed", matrix).

    Raises ValueError on malformed input or invalid states.
    """
    doc = json.loads(Path(path).read_text())
    kind = doc.get("kind")
    if kind == "pure":
        psi = json_to_vector(doc["amplitudes"])
        density_from_pure(psi)  # normalization check
        return "pure", psi
    if kind == "mixed":
        rho = json_to_matrix(doc["matrix"])
        diag = validate(rho)
        if not diag.is_valid:
            raise ValueError(
                f"invalid density matrix: hermiticity defect {diag.hermiticity_defect:.2e}, "
                f"trace defect {diag.trace_defect:.2e}, min eigenvalue {diag.min_eigenvalue:.2e}"
            )
        return "mixed", rho
    raise ValueError(f"state file must have kind 'pure' or 'mixed', got {kind!r}")


def state_to_density(kind: str, data: np.ndarray) -> np.ndarray:
    return density_from_pure(data) if kind == "pure" else data


def save_pure_state(psi: np.ndarray, path: str | Path) -> None:
    doc = {"kind": "pure", "amplitudes": vector_to_json(psi)}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def save_mixed_state(rho: np.ndarray, path: str | Path) -> None:
    doc = {"kind": "mixed", "matrix": matrix_to_json(rho)}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_kraus(path: str | Path) -> list[np.ndarray]:
    doc = json.loads(Path(path).read_text())
    ops = doc.get("operators")
    if not ops:
        raise ValueError("Kraus file must contain a nonempty 'operators' list")
    return [json_to_matrix(op) for op in ops]


def save_kraus(kraus: list[np.ndarray], path: str | Path) -> None:
    doc = {"operators": [matrix_to_json(k) for k in kraus]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def measure_result_to_json(result: MeasureResult) -> dict:
    out = {
        "value": result.value,
        "gap": result.certificate.gap,
        "method": result.certificate.method,
        "iterations": result.certificate.iterations,
        "optimizer": matrix_to_json(result.optimizer),
    }
    if result.certificate.oracle_gap is not None:
        out["oracle_gap"] = result.certificate.oracle_gap
    return out


def bound_report_to_json(report: BoundReport) -> dict:
    out = {"lemma_bound": report.lemma_bound, "witness_lower": report.witness_lower}
    if report.line_bound is not None:
        out["line_bound"] = report.line_bound
    return out
