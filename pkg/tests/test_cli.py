"""End-to-end tests of the command-line interface: files written, exit
codes, JSON mode, config-file precedence, and byte-for-byte
reproducibility of every output."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from bcsgl import symbols
from bcsgl.cli import main

TC_REF = 0.11266698714327537
DC_REF = 11.584806863455265


def snapshot(d: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


# ---------------------------------------------------------------------------
# commands and their outputs
# ---------------------------------------------------------------------------


def test_gap_command_writes_files_and_reruns_byte_identically(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["gap", "--out", str(a)]) == 0
    out = capsys.readouterr().out
    assert "T_c" in out
    assert {p.name for p in a.iterdir()} == {"gap.json", "alpha_star.txt", "alpha_star.png"}
    payload = json.loads((a / "gap.json").read_text())
    assert payload["Tc"] == pytest.approx(TC_REF, rel=1e-12)
    assert (a / "alpha_star.txt").read_text().startswith("#")

    assert main(["gap", "--out", str(b)]) == 0
    assert snapshot(a) == snapshot(b)


def test_coeffs_command_emits_json_summary(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["coeffs", "--out", str(out), "--json"]) == 0
    line = capsys.readouterr().out.strip()
    summary = json.loads(line)  # --json prints a single machine-readable line
    assert summary["Dc"] == pytest.approx(DC_REF, rel=1e-12)
    disk = json.loads((out / "coeffs.json").read_text())
    assert disk["Lambda0"] > 0 and disk["Lambda2"] > 0 and disk["Lambda3"] > 0
    assert disk["Dc"] == summary["Dc"]


def test_tcshift_command_writes_the_sweep(tmp_path):
    out = tmp_path / "t"
    assert main(["tcshift", "--out", str(out), "--b-range", "0,0.02,3"]) == 0
    lines = (out / "tcshift.csv").read_text().strip().split("\n")
    assert lines[0] == "# B tc"
    assert len(lines) == 4
    b0, tc0 = (float(tok) for tok in lines[1].split())
    assert b0 == 0.0 and tc0 == pytest.approx(TC_REF, rel=1e-12)
    assert (out / "tcshift.png").stat().st_size > 0


@pytest.mark.filterwarnings("ignore::bcsgl.glmin.NonConvergenceWarning")
def test_glmin_command_writes_curve_and_field(tmp_path):
    args = ["--cell-n", "16", "--d-range", "0.9,1.1,2", "--seed", "3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["glmin", "--out", str(a), *args]) == 0
    names = {p.name for p in a.iterdir()}
    assert names == {"glmin.json", "egl_curve.csv", "egl_curve.png", "psi.txt", "psi.png"}
    payload = json.loads((a / "glmin.json").read_text())
    assert len(payload["results"]) == 2
    assert payload["results"][0]["energy"] == 0.0  # subcritical: normal state
    assert payload["results"][1]["energy"] < 0.0
    assert "threshold_exponent" in payload
    assert (a / "psi.txt").read_text().startswith("# cell:")

    assert main(["glmin", "--out", str(b), *args]) == 0
    assert snapshot(a) == snapshot(b)


def test_verify_command_symbols_group(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--groups", "symbols", "--out", str(a)]) == 0
    out = capsys.readouterr().out
    assert "10/10 checks passed" in out
    assert main(["verify", "--groups", "symbols", "--out", str(b)]) == 0
    assert snapshot(a) == snapshot(b)


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


def test_usage_errors_exit_one(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    assert main(["gap", "--bracket", "1,0", "--out", str(tmp_path)]) == 1
    assert main(["gap", "--potential", "nope:v0=1", "--out", str(tmp_path)]) == 1
    assert main(["gap", "--config", str(tmp_path / "missing.ini")]) == 1
    assert main(["glmin", "--cell-n", "15", "--out", str(tmp_path)]) == 1
    assert main(["gap", "--mu", "-1", "--out", str(tmp_path)]) == 1


def test_numerical_failures_exit_two(tmp_path, capsys):
    # a bracket that does not straddle the transition
    rc = main(["gap", "--bracket", "0.5,1.0", "--out", str(tmp_path)])
    assert rc == 2
    assert "numerical failure" in capsys.readouterr().err


def test_verification_failure_exits_three(tmp_path, monkeypatch):
    orig = symbols.g1_over_x
    monkeypatch.setattr(symbols, "g1_over_x", lambda x, beta: 1.01 * orig(x, beta))
    rc = main(["verify", "--groups", "symbols", "--out", str(tmp_path)])
    assert rc == 3
    assert (tmp_path / "verify.jsonl").exists()  # the report is still written


def test_version_flag_exits_cleanly():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def test_config_file_is_read_and_flags_take_precedence(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\ncell_n = 15\ngroups = symbols\n")
    # config supplies an odd lattice size -> configuration error
    assert main(["verify", "--config", str(ini), "--out", str(tmp_path / "x")]) == 1
    # an explicit flag overrides the config value
    rc = main(
        ["verify", "--config", str(ini), "--cell-n", "16", "--out", str(tmp_path / "y")]
    )
    assert rc == 0
    # groups came from the config: only the symbols entries are present
    lines = (tmp_path / "y" / "verify.jsonl").read_text().strip().split("\n")
    assert json.loads(lines[-1])["summary"]["total"] == 10


def test_potential_roundtrip_through_a_file(tmp_path, capsys):
    from bcsgl.model import builtin_potential, save_radial

    path = tmp_path / "well.txt"
    save_radial(builtin_potential("gaussian", v0=2.0, a=1.0), path)
    out = tmp_path / "o"
    rc = main(
        ["gap", "--potential", f"file:{path}", "--out", str(out), "--json"]
    )
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["Tc"] == pytest.approx(TC_REF, rel=1e-12)
