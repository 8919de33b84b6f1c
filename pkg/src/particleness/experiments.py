"""Rank-resolved complementarity scan and the saturating-state search.

The scan draws Haar-uniform states of each requested rank, evaluates the
trace-norm coherence and particle measures per state, and checks the whole
scatter against the complementarity line (see `bound_lhs` for the exact
coordinates).  Outputs are a CSV of records, a JSON metadata sidecar, a
standalone gnuplot script, and (via the plotting module) a rendered figure.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import (
    EmptyInputError,
    ScanFailureError,
    SolverNotConvergedError,
    WrongDimensionError,
    WrongSpecError,
)
from .measures import coherence_trace, particleness_trace
from .states import (
    GENERATOR_NAME,
    as_rng,
    density_from_pure,
    sample_haar_pure,
    sample_induced_mixed,
)
from .system import SystemSpec

CSV_HEADER = "rank,sample_index,coherence,particleness,coherence_gap,particleness_gap"

DEFAULT_BOUND_SLOPE = 1.3
DEFAULT_BOUND_INTERCEPT = 1.8
DEFAULT_BOUND_TOL = 0.02
MAX_FAILURE_FRACTION = 1e-3


def bound_lhs(particleness: float, coherence: float, a: float = DEFAULT_BOUND_SLOPE) -> float:
    """Left-hand side of the complementarity line for one state.

    The line's particle coordinate is the trace distance to the free set,
    i.e. half the trace-norm measure stored in the records; the coherence
    coordinate is the trace-norm coherence itself.  With these coordinates
    the scatter obeys lhs <= 1.8 with saturation by certain pure states;
    with the raw trace-norm particleness it does not.
    """
    return particleness / 2.0 + a * coherence


@dataclass(frozen=True)
class ScanConfig:
    dim: int = 3
    samples_per_rank: int = 3000
    ranks: tuple[int, ...] = (1, 2, 3)
    seed: int = 1234
    gap_tol: float = 1e-9
    output_dir: str = "scan_output"

    def __post_init__(self):
        if self.samples_per_rank < 1:
            raise ValueError("samples_per_rank must be >= 1")
        if not self.ranks or any(not 1 <= r <= self.dim for r in self.ranks):
            raise ValueError(f"ranks must be within 1..{self.dim}, got {self.ranks}")

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "samples_per_rank": self.samples_per_rank,
            "ranks": list(self.ranks),
            "seed": self.seed,
            "gap_tol": self.gap_tol,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ScanConfig":
        return cls(
            dim=int(d.get("dim", 3)),
            samples_per_rank=int(d.get("samples_per_rank", 3000)),
            ranks=tuple(d.get("ranks", (1, 2, 3))),
            seed=int(d.get("seed", 1234)),
            gap_tol=float(d.get("gap_tol", 1e-9)),
            output_dir=str(d.get("output_dir", "scan_output")),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ScanConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ScanRecord:
    rank: int
    sample_index: int
    coherence: float
    particleness: float
    coherence_gap: float
    particleness_gap: float

    @property
    def lhs(self) -> float:
        return bound_lhs(self.particleness, self.coherence)


@dataclass(frozen=True)
class BoundCheck:
    slope: float
    intercept: float
    tol_bound: float
    max_lhs: float
    violations: int
    argmax: ScanRecord | None
    per_rank_max: dict[int, float]
    rank_ordering_ok: bool
    fitted_intercept: float


def run_scan(cfg: ScanConfig, spec: SystemSpec | None = None) -> tuple[list[ScanRecord], dict]:
    """Draw states rank by rank, evaluate both measures, return records.

    Solver failures are recorded in the metadata and excluded from the
    records; more than 0.1% of them aborts the scan (silent exclusion at
    that rate would bias the scatter).
    """
    spec = spec or SystemSpec.default(cfg.dim)
    rng = as_rng(cfg.seed)
    t_start = time.perf_counter()

    # All states are drawn first, from a single stream, so the sample set
    # depends only on the seed (not on evaluation order or failures).
    draws: list[tuple[int, int, np.ndarray]] = []
    for rank in cfg.ranks:
        for i in range(cfg.samples_per_rank):
            if rank == 1:
                rho = density_from_pure(sample_haar_pure(cfg.dim, rng))
            else:
                rho = sample_induced_mixed(cfg.dim, rank, rng)
            draws.append((rank, i, rho))
    t_sampled = time.perf_counter()

    records: list[ScanRecord] = []
    failures: list[dict] = []
    for rank, i, rho in draws:
        try:
            c = coherence_trace(rho, gap_tol=cfg.gap_tol)
            p = particleness_trace(rho, spec, gap_tol=cfg.gap_tol)
        except SolverNotConvergedError as err:
            failures.append(
                {"rank": rank, "sample_index": i, "gap": err.gap, "error": str(err)}
            )
            continue
        records.append(
            ScanRecord(
                rank=rank,
                sample_index=i,
                coherence=c.value,
                particleness=p.value,
                coherence_gap=c.certificate.gap,
                particleness_gap=p.certificate.gap,
            )
        )
    t_done = time.perf_counter()

    metadata = {
        "config": cfg.to_json_dict(),
        "spec": spec.to_json_dict(),
        "prng": GENERATOR_NAME,
        "numpy_version": np.__version__,
        "library_version": __version__,
        "n_records": len(records),
        "n_failures": len(failures),
        "failures": failures,
        "timings": {
            "sampling_s": t_sampled - t_start,
            "solving_s": t_done - t_sampled,
            "total_s": t_done - t_start,
        },
    }
    total = len(draws)
    if total and len(failures) / total > MAX_FAILURE_FRACTION:
        raise ScanFailureError(
            f"{len(failures)} of {total} samples failed to solve "
            f"(> {MAX_FAILURE_FRACTION:.1%}); scan aborted"
        )
    return records, metadata


def check_bound(
    records: Sequence[ScanRecord],
    a: float = DEFAULT_BOUND_SLOPE,
    b: float = DEFAULT_BOUND_INTERCEPT,
    tol_bound: float = DEFAULT_BOUND_TOL,
) -> BoundCheck:
    """Max of the line quantity (see `bound_lhs`), violations, rank ordering."""
    if not records:
        raise EmptyInputError("no records to check")
    lhs = np.array([bound_lhs(r.particleness, r.coherence, a) for r in records])
    i_max = int(np.argmax(lhs))
    violations = int(np.sum(lhs > b + tol_bound))
    per_rank: dict[int, float] = {}
    for rec, val in zip(records, lhs):
        per_rank[rec.rank] = max(per_rank.get(rec.rank, -np.inf), float(val))
    ranks_sorted = sorted(per_rank)
    ordering_ok = all(
        per_rank[r1] > per_rank[r2] for r1, r2 in zip(ranks_sorted, ranks_sorted[1:])
    )
    return BoundCheck(
        slope=a,
        intercept=b,
        tol_bound=tol_bound,
        max_lhs=float(lhs[i_max]),
        violations=violations,
        argmax=records[i_max],
        per_rank_max=per_rank,
        rank_ordering_ok=ordering_ok,
        fitted_intercept=float(lhs[i_max]),
    )


def find_saturating_pure(
    spec: SystemSpec,
    a: float = DEFAULT_BOUND_SLOPE,
    restarts: int = 50,
    seed: int | np.random.Generator | None = None,
    n_iter: int = 150,
    gap_tol_search: float = 1e-7,
    gap_tol_final: float = 1e-9,
) -> tuple[np.ndarray, float]:
    """Maximize the complementarity line quantity over pure qutrit states.

    The objective is `bound_lhs` (trace-distance particle coordinate plus
    a * trace-norm coherence), whose global maximum saturates the bounding
    line.  Multistart adaptive random ascent on the amplitude vector (global
    phase is irrelevant to both measures); the first start is the top level
    |2>, the rest are Haar draws.  The best state is re-evaluated at the
    tight solver tolerance before being returned.
    """
    if spec.dim != 3:
        raise WrongDimensionError("saturating-state search is defined for qutrits")
    if not spec.is_default_ladder:
        raise WrongSpecError("saturating-state search requires the default ladder")
    rng = as_rng(seed)

    def objective(psi: np.ndarray, gap_tol: float) -> float:
        rho = density_from_pure(psi)
        p = particleness_trace(rho, spec, gap_tol=gap_tol).value
        c = coherence_trace(rho, gap_tol=gap_tol).value
        return bound_lhs(p, c, a)

    best_psi, best_val = None, -np.inf
    for start in range(restarts):
        if start == 0:
            psi = np.array([0.0, 0.0, 1.0], dtype=complex)
        else:
            psi = sample_haar_pure(3, rng)
        val = objective(psi, gap_tol_search)
        step = 0.3
        for _ in range(n_iter):
            z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            cand = psi + step * z
            cand /= np.linalg.norm(cand)
            cand_val = objective(cand, gap_tol_search)
            if cand_val > val:
                psi, val = cand, cand_val
                step = min(0.5, step * 1.25)
            else:
                step = max(1e-6, step * 0.85)
        if val > best_val:
            best_psi, best_val = psi, val

    final_val = objective(best_psi, gap_tol_final)
    return best_psi, final_val


# ---------------------------------------------------------------------------
# Scan outputs
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    """12 significant digits, shortest decimal form."""
    return format(float(x), ".12g")


def write_records_csv(records: Sequence[ScanRecord], path: str | Path) -> None:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.rank),
                    str(r.sample_index),
                    format_float(r.coherence),
                    format_float(r.particleness),
                    format_float(r.coherence_gap),
                    format_float(r.particleness_gap),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_records_csv(path: str | Path) -> list[ScanRecord]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    records = []
    for line in lines[1:]:
        rank, idx, c, p, cg, pg = line.split(",")
        records.append(
            ScanRecord(int(rank), int(idx), float(c), float(p), float(cg), float(pg))
        )
    return records


def write_metadata(metadata: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(metadata, indent=2) + "\n")


def emit_plot_script(
    records: Sequence[ScanRecord],
    output_path: str | Path,
    csv_path: str | Path | None = None,
    a: float = DEFAULT_BOUND_SLOPE,
    b: float = DEFAULT_BOUND_INTERCEPT,
) -> None:
    """Write a standalone gnuplot script for the scatter plus bounding line.

    The CSV is referenced by a path relative to the script so the pair can
    be moved together.  With no records only the line is drawn.
    """
    output_path = Path(output_path)
    style = {1: ("1", "red"), 2: ("2", "blue"), 3: ("3", "magenta")}
    lines = [
        "# scatter of trace-norm coherence vs trace-norm particleness by state rank",
        "# bounding line in these axes: particleness/2 + a*coherence = b",
        "set terminal pngcairo size 900,600",
        f"set output '{output_path.stem}.png'",
        "set datafile separator ','",
        "set xlabel 'trace-norm particleness'",
        "set ylabel 'trace-norm coherence'",
        "set xrange [0:1.45]",
        "set yrange [0:1.45]",
        "set key top right",
        f"f(x) = ({format_float(b)} - x / 2.0) / {format_float(a)}",
    ]
    plot_parts = [f"f(x) with lines lc rgb 'black' title 'P/2 + {a:g} C = {b:g}'"]
    if records and csv_path is not None:
        rel_csv = Path(csv_path).name
        present = sorted({r.rank for r in records})
        for rank in present:
            pt, color = style.get(rank, ("7", "gray"))
            plot_parts.append(
                f"'{rel_csv}' every ::1 using ($1=={rank}?$4:1/0):3 "
                f"with points pt {pt} lc rgb '{color}' title 'rank {rank}'"
            )
    lines.append("plot \\")
    lines.append(", \\\n".join("    " + p for p in plot_parts))
    Path(output_path).write_text("\n".join(lines) + "\n")


def run_scan_to_files(
    cfg: ScanConfig,
    spec: SystemSpec | None = None,
    render_figure: bool = True,
) -> tuple[list[ScanRecord], dict, BoundCheck]:
    """Full scan pipeline: records, CSV, metadata, plot script, figure."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records, metadata = run_scan(cfg, spec)
    write_records_csv(records, out / "scan.csv")
    check = check_bound(records)
    metadata["bound_check"] = {
        "slope": check.slope,
        "intercept": check.intercept,
        "tol_bound": check.tol_bound,
        "max_lhs": check.max_lhs,
        "violations": check.violations,
        "per_rank_max": {str(k): v for k, v in check.per_rank_max.items()},
        "rank_ordering_ok": check.rank_ordering_ok,
        "fitted_intercept": check.fitted_intercept,
    }
    write_metadata(metadata, out / "scan_meta.json")
    emit_plot_script(records, out / "scan_plot.gp", csv_path=out / "scan.csv")
    if render_figure:
        from .plotting import render_scan_figure

        render_scan_figure(records, out / "scan.png")
    return records, metadata, check
