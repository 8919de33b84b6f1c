import json
import subprocess
import sys

import numpy as np
import pytest

from particleness.cli import main
from particleness.serialize import (
    load_state,
    save_kraus,
    save_mixed_state,
    save_pure_state,
)
from particleness.states import as_rng, sample_haar_pure
from particleness.system import SystemSpec

from conftest import ket


@pytest.fixture
def ket2_file(tmp_path):
    path = tmp_path / "ket2.json"
    save_pure_state(ket(2), path)
    return str(path)


@pytest.fixture
def ket1_file(tmp_path):
    path = tmp_path / "ket1.json"
    save_pure_state(ket(1), path)
    return str(path)


@pytest.fixture
def mixed_file(tmp_path):
    path = tmp_path / "mixed.json"
    save_mixed_state(np.eye(3, dtype=complex) / 3, path)
    return str(path)


class TestSerialize:
    def test_pure_round_trip(self, tmp_path):
        psi = sample_haar_pure(3, as_rng(1))
        path = tmp_path / "psi.json"
        save_pure_state(psi, path)
        kind, back = load_state(path)
        assert kind == "pure"
        assert np.allclose(psi, back)

    def test_mixed_round_trip(self, tmp_path):
        rho = np.array([[0.6, 0.2j, 0], [-0.2j, 0.4, 0], [0, 0, 0]], dtype=complex)
        path = tmp_path / "rho.json"
        save_mixed_state(rho, path)
        kind, back = load_state(path)
        assert kind == "mixed"
        assert np.allclose(rho, back)

    def test_invalid_state_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        save_mixed_state(np.diag([1.0, 1.0, -1.0]).astype(complex), path)
        with pytest.raises(ValueError):
            load_state(path)


class TestClassifyCommand:
    def test_resourceful_exit_code(self, ket2_file, capsys):
        code = main(["classify", ket2_file])
        out = capsys.readouterr().out
        assert code == 2
        assert "Resourceful, energy=2.000000000" in out

    def test_edge_exit_code(self, ket1_file, capsys):
        code = main(["classify", ket1_file])
        assert code == 0
        assert "Edge" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["classify", str(bad)]) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_json_output(self, ket2_file, capsys):
        code = main(["classify", ket2_file, "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 2
        assert doc["label"] == "Resourceful"
        assert abs(doc["energy"] - 2.0) < 1e-12
        assert abs(doc["witness_value"] - 1.0) < 1e-12

    def test_custom_spec(self, ket2_file, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        SystemSpec(dim=3, level_energies=(0.0, 1.0, 2.0), threshold=2.5).save(spec_path)
        code = main(["classify", ket2_file, "--spec", str(spec_path)])
        assert code == 0  # threshold above the top level energy


class TestMeasureCommand:
    def test_top_level_both(self, ket2_file, capsys):
        code = main(["measure", ket2_file, "--measure", "both", "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert abs(doc["particleness"]["value"] - 1.0) < 1e-6
        assert doc["coherence"]["value"] == 0.0
        assert doc["particleness"]["gap"] <= 1e-8

    def test_maximally_mixed_is_free_and_incoherent(self, mixed_file, capsys):
        code = main(["measure", mixed_file, "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["particleness"]["value"] == 0.0
        assert doc["coherence"]["value"] == 0.0

    def test_bounds_sandwich(self, tmp_path, capsys):
        psi = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        path = tmp_path / "coh.json"
        save_pure_state(psi, path)
        code = main(["measure", str(path), "--measure", "particleness", "--bounds", "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        val = doc["particleness"]["value"]
        b = doc["bounds"]
        assert b["witness_lower"] - 1e-9 <= val <= b["lemma_bound"] + 1e-9

    def test_human_output(self, ket2_file, capsys):
        code = main(["measure", ket2_file])
        out = capsys.readouterr().out
        assert code == 0
        assert "particleness: value=1.000000000" in out


class TestCheckOpsCommand:
    def test_identity_free(self, tmp_path, capsys):
        path = tmp_path / "id.json"
        save_kraus([np.eye(3, dtype=complex)], path)
        code = main(["check-ops", str(path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "Free" in out

    def test_cyclic_raise_not_free_with_certificate(self, tmp_path, capsys):
        k = [
            np.outer(ket(2), ket(0)),
            np.outer(ket(0), ket(1)),
            np.outer(ket(1), ket(2)),
        ]
        path = tmp_path / "cyc.json"
        save_kraus(k, path)
        code = main(["check-ops", str(path), "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["verdict"] == "NotFree"
        assert doc["worst_energy"] > 1.0
        assert "certificate_state" in doc

    def test_phase_unitary_fast_path(self, tmp_path, capsys):
        u = np.diag([1.0, np.exp(0.5j), np.exp(1.0j)])
        path = tmp_path / "u.json"
        save_kraus([u], path)
        code = main(["check-ops", str(path), "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["verdict"] == "Free"
        assert doc["used_commutation_fast_path"]

    def test_incomplete_set_exit_one(self, tmp_path, capsys):
        path = tmp_path / "half.json"
        save_kraus([0.5 * np.eye(3, dtype=complex)], path)
        code = main(["check-ops", str(path)])
        err = capsys.readouterr().err
        assert code == 1
        assert "defect" in err


class TestSampleCommand:
    def test_deterministic_pure_files(self, tmp_path, capsys):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            code = main(
                ["sample", "--dim", "3", "--rank", "1", "--count", "2",
                 "--seed", "7", "--out-dir", str(out)]
            )
            assert code == 0
        capsys.readouterr()
        f1 = sorted(out1.glob("*.json"))
        f2 = sorted(out2.glob("*.json"))
        assert len(f1) == 2
        for a, b in zip(f1, f2):
            assert a.read_bytes() == b.read_bytes()
        for f in f1:
            kind, _ = load_state(f)
            assert kind == "pure"

    def test_full_rank_density_file(self, tmp_path, capsys):
        code = main(
            ["sample", "--dim", "3", "--rank", "3", "--count", "1",
             "--seed", "1", "--out-dir", str(tmp_path)]
        )
        capsys.readouterr()
        assert code == 0
        kind, rho = load_state(next(tmp_path.glob("*.json")))
        assert kind == "mixed"
        assert np.linalg.matrix_rank(rho, tol=1e-10) == 3

    def test_qubit_samples_never_resourceful(self, tmp_path, capsys):
        code = main(
            ["sample", "--dim", "2", "--rank", "2", "--count", "100",
             "--seed", "3", "--out-dir", str(tmp_path)]
        )
        capsys.readouterr()
        assert code == 0
        for f in tmp_path.glob("*.json"):
            assert main(["classify", str(f)]) in (0,)
            capsys.readouterr()

    def test_invalid_rank_exit_one(self, tmp_path, capsys):
        code = main(
            ["sample", "--dim", "3", "--rank", "4", "--count", "1",
             "--out-dir", str(tmp_path)]
        )
        capsys.readouterr()
        assert code == 1


class TestScanCommand:
    def test_scan_outputs_and_determinism(self, tmp_path, capsys):
        cfg = {
            "dim": 3,
            "samples_per_rank": 8,
            "ranks": [1, 2, 3],
            "seed": 99,
            "output_dir": str(tmp_path / "run1"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        code = main(["scan", str(cfg_path), "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["violations"] == 0
        assert doc["records"] == 24

        cfg["output_dir"] = str(tmp_path / "run2")
        cfg_path.write_text(json.dumps(cfg))
        code = main(["scan", str(cfg_path), "--json"])
        capsys.readouterr()
        assert code == 0
        csv1 = (tmp_path / "run1" / "scan.csv").read_bytes()
        csv2 = (tmp_path / "run2" / "scan.csv").read_bytes()
        assert csv1 == csv2

    def test_scan_single_rank(self, tmp_path, capsys):
        cfg = {
            "dim": 3,
            "samples_per_rank": 5,
            "ranks": [1],
            "seed": 4,
            "output_dir": str(tmp_path / "out"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert main(["scan", str(cfg_path)]) == 0
        capsys.readouterr()
        lines = (tmp_path / "out" / "scan.csv").read_text().splitlines()
        assert all(line.split(",")[0] == "1" for line in lines[1:])


def test_console_entry_point(tmp_path):
    # the installed module is runnable as a subprocess
    state = tmp_path / "s.json"
    save_pure_state(ket(2), state)
    proc = subprocess.run(
        [sys.executable, "-m", "particleness", "classify", str(state)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "Resourceful" in proc.stdout
