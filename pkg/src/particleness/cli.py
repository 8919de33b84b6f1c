"""Command-line interface.

Commands: classify, measure, check-ops, scan, sample.  Structured inputs
and outputs are JSON files (states, specs, Kraus sets, results); bulk scan
records go to CSV.  Exit codes are part of the contract per command and are
documented in the README.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ParticlenessError, ScanFailureError, SolverNotConvergedError
from .experiments import ScanConfig, find_saturating_pure, run_scan_to_files
from .measures import bound_report, coherence_trace, particleness_trace
from .operations import commutes_with_hamiltonian, is_energy_invariant, is_free_operation
from .serialize import (
    bound_report_to_json,
    load_kraus,
    load_state,
    matrix_to_json,
    measure_result_to_json,
    save_mixed_state,
    save_pure_state,
    state_to_density,
)
from .states import sample_haar_pure, sample_induced_mixed, as_rng
from .system import SystemSpec, classify, witness_value

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_RESOURCEFUL = 2
EXIT_SOLVER = 3


def _load_spec(args, dim: int) -> SystemSpec:
    if getattr(args, "spec", None):
        return SystemSpec.load(args.spec)
    return SystemSpec.default(dim)


def _fail(msg: str, code: int = EXIT_ERROR) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_classify(args) -> int:
    try:
        kind, data = load_state(args.state)
        rho = state_to_density(kind, data)
        spec = _load_spec(args, rho.shape[0])
        eps = args.tol if args.tol is not None else 1e-9
        cls = classify(rho, spec, eps_edge=eps)
        wval = witness_value(rho, spec)
    except (ParticlenessError, ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        return _fail(str(err))
    if args.json:
        print(
            json.dumps(
                {
                    "label": str(cls.label),
                    "energy": cls.energy,
                    "margin": cls.margin,
                    "witness_value": wval,
                }
            )
        )
    else:
        print(
            f"{cls.label}, energy={cls.energy:.9f}, margin={cls.margin:.9f}, "
            f"witness={wval:.9f}"
        )
    return EXIT_RESOURCEFUL if cls.label.value == "Resourceful" else EXIT_OK


def cmd_measure(args) -> int:
    try:
        kind, data = load_state(args.state)
        rho = state_to_density(kind, data)
        spec = _load_spec(args, rho.shape[0])
    except (ParticlenessError, ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        return _fail(str(err))
    gap_tol = args.tol if args.tol is not None else 1e-9

    out: dict = {}
    try:
        if args.measure in ("particleness", "both"):
            out["particleness"] = measure_result_to_json(
                particleness_trace(rho, spec, gap_tol=gap_tol)
            )
        if args.measure in ("coherence", "both"):
            out["coherence"] = measure_result_to_json(coherence_trace(rho, gap_tol=gap_tol))
    except SolverNotConvergedError as err:
        best = err.best
        doc = {"error": str(err), "gap": err.gap, "iterations": err.iterations}
        if best is not None:
            doc["best_objective"] = best.pobj
        print(json.dumps(doc))
        return EXIT_SOLVER
    except ParticlenessError as err:
        return _fail(str(err))

    if args.bounds:
        try:
            psi = data if kind == "pure" else None
            out["bounds"] = bound_report_to_json(bound_report(rho, spec, psi=psi))
        except ParticlenessError as err:
            return _fail(str(err))

    if args.json:
        print(json.dumps(out))
    else:
        for name in ("particleness", "coherence"):
            if name in out:
                r = out[name]
                print(
                    f"{name}: value={r['value']:.9f} gap={r['gap']:.3e} "
                    f"method={r['method']}"
                )
        if "bounds" in out:
            b = out["bounds"]
            line = f" line={b['line_bound']:.9f}" if "line_bound" in b else ""
            print(
                f"bounds: witness_lower={b['witness_lower']:.9f} "
                f"lemma={b['lemma_bound']:.9f}{line}"
            )
    return EXIT_OK


def cmd_check_ops(args) -> int:
    try:
        kraus = load_kraus(args.kraus)
        spec = _load_spec(args, kraus[0].shape[0])
        tol = args.tol if args.tol is not None else 1e-8
        commutes = commutes_with_hamiltonian(kraus, spec)
        invariant = is_energy_invariant(kraus, spec, rng=args.seed)
        verdict = is_free_operation(kraus, spec, tol_violation=tol, rng=args.seed)
    except (ParticlenessError, ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        return _fail(str(err))
    if args.json:
        doc = {
            "commutes_with_hamiltonian": commutes,
            "energy_invariant": invariant,
            "verdict": str(verdict.verdict),
            "used_commutation_fast_path": verdict.used_commutation_fast_path,
        }
        if verdict.worst_subset is not None:
            doc["worst_subset"] = list(verdict.worst_subset)
            doc["worst_energy"] = verdict.worst_energy
        if str(verdict.verdict) == "NotFree":
            doc["certificate_state"] = matrix_to_json(verdict.worst_state)
        print(json.dumps(doc))
    else:
        print(f"commutes with Hamiltonian: {commutes}")
        print(f"energy invariant: {invariant}")
        print(f"free-operation verdict: {verdict.verdict}")
        if str(verdict.verdict) == "NotFree":
            print(
                f"violating subset {list(verdict.worst_subset)} reaches normalized "
                f"post-energy {verdict.worst_energy:.9f} on the certificate state:"
            )
            print(np.array_str(verdict.worst_state, precision=6, suppress_small=True))
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        cfg = ScanConfig.load(args.config)
        if args.seed is not None:
            cfg = ScanConfig.from_json_dict({**cfg.to_json_dict(), "seed": args.seed})
        if args.tol is not None:
            cfg = ScanConfig.from_json_dict({**cfg.to_json_dict(), "gap_tol": args.tol})
        spec = SystemSpec.load(args.spec) if args.spec else None
    except (ParticlenessError, ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        return _fail(str(err))
    try:
        records, metadata, check = run_scan_to_files(cfg, spec)
    except ScanFailureError as err:
        return _fail(str(err), EXIT_SOLVER)
    except ParticlenessError as err:
        return _fail(str(err))

    summary = {
        "records": len(records),
        "failures": metadata["n_failures"],
        "max_lhs": check.max_lhs,
        "violations": check.violations,
        "per_rank_max": {str(k): v for k, v in sorted(check.per_rank_max.items())},
        "rank_ordering_ok": check.rank_ordering_ok,
        "fitted_intercept": check.fitted_intercept,
        "output_dir": cfg.output_dir,
    }
    if args.json:
        print(json.dumps(summary))
    else:
        print(
            f"scan: {summary['records']} records, {summary['failures']} failures, "
            f"outputs in {cfg.output_dir}"
        )
        print(
            f"bound P/2 + {check.slope:g} C <= {check.intercept:g}: max lhs "
            f"{check.max_lhs:.6f}, {check.violations} violations "
            f"(tolerance {check.tol_bound:g})"
        )
        ranks = " > ".join(
            f"rank{r}:{check.per_rank_max[r]:.6f}" for r in sorted(check.per_rank_max)
        )
        print(f"per-rank maxima: {ranks} (ordering ok: {check.rank_ordering_ok})")
    return EXIT_RESOURCEFUL if check.violations > 0 else EXIT_OK


def cmd_sample(args) -> int:
    try:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        rng = as_rng(args.seed)
        if not 1 <= args.rank <= args.dim:
            raise ValueError(f"rank must be within 1..{args.dim}, got {args.rank}")
        paths = []
        for i in range(args.count):
            name = out_dir / f"state_d{args.dim}_r{args.rank}_{i:04d}.json"
            if args.rank == 1:
                save_pure_state(sample_haar_pure(args.dim, rng), name)
            else:
                save_mixed_state(sample_induced_mixed(args.dim, args.rank, rng), name)
            paths.append(str(name))
    except (ParticlenessError, ValueError, OSError) as err:
        return _fail(str(err))
    if args.json:
        print(json.dumps({"files": paths}))
    else:
        for p in paths:
            print(p)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, seed_default=None) -> None:
    p.add_argument("--spec", help="SystemSpec JSON file (default: zero-detuning ladder)")
    p.add_argument("--json", action="store_true", help="machine-parseable JSON output")
    p.add_argument("--seed", type=int, default=seed_default, help="PRNG seed")
    p.add_argument("--tol", type=float, default=None, help="primary numerical tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="particleness",
        description="Energy-threshold resource theory: classify states, verify "
        "operations, compute trace-norm measures, and run complementarity scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a state as free/edge/resourceful")
    p.add_argument("state", help="state JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("measure", help="trace-norm particleness/coherence of a state")
    p.add_argument("state", help="state JSON file")
    p.add_argument(
        "--measure",
        choices=("particleness", "coherence", "both"),
        default="both",
    )
    p.add_argument("--bounds", action="store_true", help="include analytic bounds")
    _add_common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("check-ops", help="verify a Kraus set as a free operation")
    p.add_argument("kraus", help="Kraus JSON file: {\"operators\": [matrix, ...]}")
    _add_common(p, seed_default=0)
    p.set_defaults(func=cmd_check_ops)

    p = sub.add_parser("scan", help="run the complementarity scan from a config file")
    p.add_argument("config", help="ScanConfig JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sample", help="write Haar/induced random state files")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    _add_common(p, seed_default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "saturate", help="search for a pure state saturating the complementarity bound"
    )
    p.add_argument("--restarts", type=int, default=50)
    _add_common(p, seed_default=0)
    p.set_defaults(func=cmd_saturate)

    return parser


def cmd_saturate(args) -> int:
    try:
        spec = _load_spec(args, 3)
        psi, lhs = find_saturating_pure(spec, restarts=args.restarts, seed=args.seed)
    except ParticlenessError as err:
        return _fail(str(err))
    if args.json:
        print(json.dumps({"lhs": lhs, "amplitudes": [[z.real, z.imag] for z in psi]}))
    else:
        print(f"best lhs (P + 1.3 C): {lhs:.6f}")
        print(f"amplitudes: {np.array_str(psi, precision=6)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
