"""Command-line interface: subcommands, config files, exit codes, reproducibility."""

import io
import json

import pytest

from spin1bell.cli import EXIT_INVALID, EXIT_OK, EXIT_UNCONVERGED, build_parser, main, resolve
from spin1bell.criticality import ScanResult
from spin1bell.imps import load_checkpoint


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def table(text):
    rows = {}
    for ln in text.splitlines():
        parts = ln.split()
        if len(parts) >= 2:
            rows[parts[0]] = parts[1:]
    return rows


class TestGroundState:
    def test_ferromagnet(self, tmp_path):
        ck = tmp_path / "fm.json"
        code, text = run("gs", "--jz", -2, "--d", 0, "--chi", 8, "--checkpoint", ck)
        assert code == EXIT_OK
        rows = table(text)
        assert float(rows["entropy"][0]) == pytest.approx(0.0, abs=1e-12)
        assert float(rows["energy_per_site"][0]) == pytest.approx(-2.0, abs=1e-10)
        assert rows["converged"] == ["true"]
        state, meta = load_checkpoint(ck)
        assert state.chi == 1
        assert meta["J_z"] == -2.0

    def test_chi_one_rejected(self, tmp_path):
        code, _ = run("gs", "--chi", 1, "--checkpoint", tmp_path / "c.json")
        assert code == EXIT_INVALID

    def test_unconverged_exit_code(self, tmp_path):
        args = ("gs", "--chi", 12, "--max-sweeps", 3, "--checkpoint", tmp_path / "c.json")
        code, text = run(*args)
        assert code == EXIT_UNCONVERGED
        assert table(text)["converged"] == ["false"]
        assert run(*args, "--allow-unconverged")[0] == EXIT_OK


class TestConfig:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"chi": 20, "jz": 0.5, "seed": 4}))
        args = build_parser().parse_args(["gs", "--config", str(cfg), "--chi", "30"])
        opts = resolve(args)
        assert (opts["chi"], opts["jz"], opts["seed"], opts["d"]) == (30, 0.5, 4, 0.0)

    def test_unknown_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"chi": 20, "bond_dim": 4}))
        assert run("gs", "--config", cfg)[0] == EXIT_INVALID

    def test_unreadable_config(self, tmp_path):
        assert run("gs", "--config", tmp_path / "missing.json")[0] == EXIT_INVALID
        bad = tmp_path / "list.json"
        bad.write_text("[1, 2]")
        assert run("gs", "--config", bad)[0] == EXIT_INVALID

    def test_usage_errors(self):
        assert run("bogus")[0] == EXIT_INVALID
        assert run("scan", "--param", "K")[0] == EXIT_INVALID
        assert run("--version")[0] == EXIT_OK


class TestOracle:
    def test_two_site_heisenberg(self):
        code, text = run("oracle", "--n", 2, "--chi", 8)
        assert code == EXIT_OK
        assert float(table(text)["ground_energy"][1]) == -2.0

    def test_antiferromagnet_bell_within_finite_size_envelope(self):
        code, text = run("oracle", "--n", 8, "--jz", 2, "--chi", 30, "--boundary", "periodic")
        assert code == EXIT_OK
        bell = table(text)["bell"]
        assert float(bell[3]) < 5e-2
        assert bell[4] == "ok/ok"

    def test_distance_checked(self):
        assert run("oracle", "--n", 4, "--r", 4)[0] == EXIT_INVALID


def _scan(tmp_path, name, *extra):
    out = tmp_path / name
    code, text = run("scan", "--param", "D", "--jz", 1, "--values", 1.5, 2.0, 2.5, 3.0, 3.5,
                     "--r", 1, 3, "--chi", 8, "--seed", 3, "--out", out, *extra)
    return code, text, out


class TestScan:
    def test_outputs_and_determinism(self, tmp_path):
        code, text, out = _scan(tmp_path, "a.csv")
        assert code == EXIT_OK
        rows = table(text)
        assert rows["rows"] == ["5"]
        assert rows["bound_violations"] == ["0"]
        result = ScanResult.read_csv(out)
        assert [p.parameter_value for p in result.points] == [1.5, 2.0, 2.5, 3.0, 3.5]
        assert result.metadata["seed"] == "3"
        assert (tmp_path / "a.csv.deriv.csv").exists()
        assert isinstance(json.loads((tmp_path / "a.csv.crit.json").read_text()), list)
        _, _, again = _scan(tmp_path, "b.csv")
        body = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        body2 = [ln for ln in again.read_text().splitlines() if not ln.startswith("#")]
        assert body == body2

    def test_crit_on_existing_csv(self, tmp_path):
        _, _, out = _scan(tmp_path, "s.csv")
        report = tmp_path / "crit.json"
        code, _ = run("crit", "--csv", out, "--r", 1, "--rules", "extremum", "--report", report)
        assert code == EXIT_OK
        assert all(rec["kind"] == "extremum" for rec in json.loads(report.read_text()))
        assert run("crit", "--csv", out, "--r", 7)[0] == EXIT_INVALID
        assert run("crit")[0] == EXIT_INVALID

    def test_grid_needs_bounds(self, tmp_path):
        assert run("scan", "--param", "D", "--out", tmp_path / "x.csv")[0] == EXIT_INVALID
        assert run("scan", "--start", 1, "--stop", 0, "--out", tmp_path / "x.csv")[0] == EXIT_INVALID


def test_aklt_check():
    code, text = run("aklt-check")
    assert code == EXIT_OK
    assert "FAIL" not in text
    assert table(text)["entropy"][2] == "ok"
