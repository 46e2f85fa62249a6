"""End-to-end command checks: artifacts, manifests, exit codes.

Every command writes into a fresh temp directory and seals a manifest;
the rerun test asserts byte-identical artifacts because downstream
consumers diff these files to detect regressions.
"""

from __future__ import annotations

import csv
import hashlib
import json

import pytest
from click.testing import CliRunner

from qcalab.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _manifest(out_dir):
    with open(out_dir / "manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


# -- clifford engine ----------------------------------------------------


def test_evolve_writes_listing_and_bitmap(runner, tmp_path):
    out = tmp_path / "run"
    res = runner.invoke(main, ["clifford", "evolve", "--seed", "@0:Z",
                               "--steps", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = _read_csv(out / "steps.csv")
    assert rows[0] == ["step", "term", "width"]
    assert rows[1] == ["0", "@0:Z", "1"]
    assert rows[2] == ["1", "@0:X", "1"]
    assert rows[3] == ["2", "@-1:XYX", "3"]
    assert (out / "spacetime.pbm").read_text().startswith("P1\n")
    man = _manifest(out)
    assert set(man["artifacts"]) == {"steps.csv", "spacetime.pbm"}
    assert man["config"]["params"]["seed"] == "@0:Z"


def test_hamiltonian_flat_orbits_exit_zero(runner, tmp_path):
    out = tmp_path / "ham"
    res = runner.invoke(main, ["clifford", "hamiltonian", "--ring-size", "6",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    orbit_rows = _read_csv(out / "orbit_coefficients.csv")
    assert orbit_rows[0][0] == "orbit_id"
    assert len(orbit_rows) == 1 + 113
    decay_rows = _read_csv(out / "decay_profile.csv")
    assert decay_rows[0] == ["diameter", "max_abs_coeff"]


def test_hamiltonian_impossible_tolerance_exit_one(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "hamiltonian", "--ring-size", "6",
                               "--tolerance", "0", "--out", str(tmp_path / "x")])
    assert res.exit_code == 1


def test_orbit_scan_clean_ring_exit_zero(runner, tmp_path):
    out = tmp_path / "scan8"
    res = runner.invoke(main, ["clifford", "orbits", "--ring-size", "8",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    summary = _read_csv(out / "growth_summary.csv")
    assert summary[0] == ["ring_size", "max_seed_diameter", "seeds_checked",
                          "max_orbit_steps", "violations", "ok"]
    assert summary[1][4] == "0" and summary[1][5] == "true"


def test_orbit_scan_violating_ring_exit_one(runner, tmp_path):
    out = tmp_path / "scan10"
    res = runner.invoke(main, ["clifford", "orbits", "--ring-size", "10",
                               "--out", str(out)])
    assert res.exit_code == 1
    violations = _read_csv(out / "growth_violations.csv")
    assert violations[0] == ["q_mask", "p_mask", "term"]
    assert len(violations) == 1 + 38


def test_orbit_listing_for_explicit_seeds(runner, tmp_path):
    out = tmp_path / "orbits"
    res = runner.invoke(main, ["clifford", "orbits", "--ring-size", "12",
                               "--seed", "@0:YZZXIIYZZX", "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = _read_csv(out / "orbits.csv")
    assert rows[0] == ["seed", "orbit_step", "member", "diameter", "orbit_length"]
    assert len(rows) == 1 + 6
    assert all(r[3] == "9" for r in rows[1:])


def test_glider_search_absence_exit_zero(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "gliders", "--max-support-len", "6",
                               "--out", str(tmp_path / "g")])
    assert res.exit_code == 0, res.output
    rows = _read_csv(tmp_path / "g" / "gliders.csv")
    assert rows == [["term", "shift"]]


def test_glider_search_expectation_mismatch_exit_one(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "gliders", "--rule", "shift",
                               "--max-support-len", "2",
                               "--out", str(tmp_path / "g")])
    assert res.exit_code == 1
    rows = _read_csv(tmp_path / "g" / "gliders.csv")
    assert len(rows) == 1 + 12


def test_glider_search_expected_gliders_exit_zero(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "gliders", "--rule", "shift",
                               "--max-support-len", "2", "--expect-gliders",
                               "--out", str(tmp_path / "g")])
    assert res.exit_code == 0, res.output


def test_glider_search_budget_exit_three(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "gliders", "--max-support-len", "10",
                               "--budget", "100", "--out", str(tmp_path / "g")])
    assert res.exit_code == 3


def test_bad_seed_syntax_is_a_usage_error(runner, tmp_path):
    res = runner.invoke(main, ["clifford", "evolve", "--seed", "@0:ABC",
                               "--out", str(tmp_path / "x")])
    assert res.exit_code == 2


# -- fermion engine -----------------------------------------------------


def test_analyze_identity_model(runner, tmp_path):
    out = tmp_path / "ident"
    res = runner.invoke(main, ["fermion", "analyze", "--model", "identity",
                               "--nk", "256", "--r-max", "20",
                               "--ring-size", "24", "--out", str(out)])
    assert res.exit_code == 0, res.output
    for name in ["bands.csv", "projectors.csv", "couplings.csv", "summary.txt",
                 "manifest.json"]:
        assert (out / name).exists(), name
    summary = (out / "summary.txt").read_text()
    assert "index: 0" in summary
    assert summary.count("winding=0") == 2
    assert "below noise floor" in summary


def test_analyze_massless_dirac_reports_critical(runner, tmp_path):
    out = tmp_path / "massless"
    res = runner.invoke(main, ["fermion", "analyze", "--model", "dirac",
                               "--theta", "0", "--nk", "256", "--r-max", "20",
                               "--ring-size", "24", "--out", str(out)])
    assert res.exit_code == 0, res.output
    summary = (out / "summary.txt").read_text()
    assert "critical" in summary
    rows = _read_csv(out / "decay_summary.csv")
    assert rows[1][2] == "inverse_distance"


def test_verify_command_writes_residual(runner, tmp_path):
    out = tmp_path / "verify"
    res = runner.invoke(main, ["fermion", "verify", "--model", "dirac",
                               "--nk", "256", "--ring-size", "24",
                               "--truncation-r-max", "12", "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = _read_csv(out / "verify.csv")
    assert rows[0] == ["ring_size", "residual"]
    assert float(rows[1][1]) < 1e-9
    residuals = _read_csv(out / "residuals.csv")
    assert residuals[0] == ["rho", "residual"]
    # rho runs 0..11: the requested 12 is capped at (L-1)//2 on L=24
    assert len(residuals) == 1 + 12
    values = [float(r[1]) for r in residuals[1:]]
    assert values == sorted(values, reverse=True)
    assert values[-1] < 1e-4


def test_couplings_command_schema(runner, tmp_path):
    out = tmp_path / "coup"
    res = runner.invoke(main, ["fermion", "couplings", "--model", "dirac",
                               "--theta", "0", "--nk", "256", "--r-max", "15",
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = _read_csv(out / "couplings.csv")
    assert rows[0] == ["delta_r", "l", "lp", "value"]
    values = {(r[0], r[1], r[2]): float(r[3]) for r in rows[1:]}
    assert values[("1", "0", "0")] == pytest.approx(1.0, abs=1e-9)
    assert values[("2", "0", "0")] == pytest.approx(-0.5, abs=1e-9)


# -- reproducibility and config resolution ------------------------------


def test_rerun_is_byte_identical(runner, tmp_path):
    args = ["fermion", "analyze", "--model", "dirac", "--nk", "256",
            "--r-max", "20", "--ring-size", "24"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, args + ["--out", str(a)]).exit_code == 0
    assert runner.invoke(main, args + ["--out", str(b)]).exit_code == 0
    files_a = sorted(p.name for p in a.iterdir())
    assert files_a == sorted(p.name for p in b.iterdir())
    for name in files_a:
        ha = hashlib.sha256((a / name).read_bytes()).hexdigest()
        hb = hashlib.sha256((b / name).read_bytes()).hexdigest()
        assert ha == hb, name


def test_config_file_overrides_flags(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta": 0.0}))
    out = tmp_path / "cfgrun"
    res = runner.invoke(main, ["fermion", "couplings", "--model", "dirac",
                               "--theta", "0.7", "--nk", "256", "--r-max", "15",
                               "--config", str(cfg), "--out", str(out)])
    assert res.exit_code == 0, res.output
    man = _manifest(out)
    assert man["config"]["params"]["theta"] == 0.0
    rows = _read_csv(out / "decay_summary.csv")
    assert rows[1][7] == "critical"  # theta=0 from the file, not 0.7


def test_config_file_rejects_unknown_keys(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"not_a_key": 1}))
    res = runner.invoke(main, ["fermion", "couplings", "--model", "dirac",
                               "--config", str(cfg),
                               "--out", str(tmp_path / "x")])
    assert res.exit_code == 2


def test_manifest_hashes_cover_artifacts(runner, tmp_path):
    out = tmp_path / "m"
    res = runner.invoke(main, ["clifford", "evolve", "--steps", "2",
                               "--out", str(out)])
    assert res.exit_code == 0
    man = _manifest(out)
    for name, digest in man["artifacts"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert man["config_sha256"]
