from __future__ import annotations

import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from kinkmanifold import cli
from kinkmanifold.errors import IntegrationError, ValidationError

H1 = ["--sigma2-sq", "0.25", "--sigma3-sq", "0.5", "--alpha-bar-sq", "0.6"]


def run(argv, capsys):
    rc = cli.main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def parse_report(text):
    vals = {}
    section = None
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
        elif "=" in line:
            k, v = (s.strip() for s in line.split("=", 1))
            vals[f"{section}.{k}"] = v
    return vals


def test_classify(capsys):
    rc, out, _ = run(["classify", *H1], capsys)
    assert rc == 0 and out.strip() == "H1"


def test_vacua_text_and_csv(capsys):
    rc, out, _ = run(["vacua", *H1], capsys)
    assert rc == 0
    rep = parse_report(out)
    assert rep["regime.cartesian_count"] == "8"
    rc, out, _ = run(["vacua", *H1, "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8


def test_sumrules(capsys):
    rc, out, _ = run(["sumrules", *H1], capsys)
    assert rc == 0
    rep = parse_report(out)
    res = [float(v) for k, v in rep.items() if k.endswith(".residual")]
    assert len(res) == 4 and max(res) < 1e-12
    assert rep["closed_form.1.residual.tol"] == repr(1e-12)


def test_profile_round_trip(tmp_path, capsys):
    path = tmp_path / "te.csv"
    rc, out, _ = run(["profile", *H1, "--family", "TE_v1v3", "-o", str(path)], capsys)
    assert rc == 0
    reported = float(out.split("=")[1])
    with open(path) as fh:
        assert tuple(next(csv.reader(fh))) == cli.PROFILE_HEADER
    cols = cli.read_profile_csv(path)
    assert np.all(np.diff(cols["x"]) > 0)
    assert abs(cli.profile_energy(cols) - reported) < 1e-10
    assert np.all(cols["eps"] >= -1e-14)


def test_solve_report(capsys):
    rc, out, _ = run(["solve", *H1, "--family", "T_v1v2"], capsys)
    assert rc == 0
    rep = parse_report(out)
    assert rep["trajectory.complete"] == "true"
    assert float(rep["energy.relative_gap"]) < 1e-4
    assert float(rep["energy.el_residual"]) < 1e-5


def test_orbit_check(capsys):
    rc, out, _ = run(["orbit-check", *H1, "--family", "T_v1v2"], capsys)
    assert rc == 0 and parse_report(out)["summary.pass"] == "true"


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# H2 parameters\nsigma2_sq = 0.25\nsigma3_sq = 0.5\nalpha_bar_sq = 0.9\n")
    rc, out, _ = run(["classify", "--config", str(cfg)], capsys)
    assert out.strip() == "H2"
    rc, out, _ = run(["classify", "--config", str(cfg), "--alpha-bar-sq", "0.6"], capsys)
    assert out.strip() == "H1"


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigma2_sq = 0.25\nbogus = 1\n")
    rc, _, err = run(["classify", "--config", str(cfg)], capsys)
    assert rc == 1 and "bogus" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--sigma2-sq", "0.6", "--sigma3-sq", "0.5", "--alpha-bar-sq", "0.6"],
        ["classify", "--sigma2-sq", "0.25"],
        ["classify", *H1, "--nope"],
        ["solve", *H1],
        ["solve", *H1, "--family", "XX"],
        ["sweep", "--sigma2-sq-grid", "a,b"],
    ],
)
def test_validation_exit_code(argv, capsys):
    rc, _, err = run(argv, capsys)
    assert rc == 1 and err.startswith("error:")


def test_numerical_exit_code(monkeypatch, capsys):
    def boom(*a, **k):
        raise IntegrationError("stiff")

    monkeypatch.setattr(cli, "enumerate_vacua", boom)
    rc, _, err = run(["vacua", *H1], capsys)
    assert rc == 2 and "numerical failure" in err


def sweep_args():
    return ["sweep", "--sigma2-sq-grid", "0.2,0.3,3", "--sigma3-sq", "0.5", "--alpha-bar-sq-grid", "0.55,0.65,3"]


def test_sweep_grid(capsys, monkeypatch):
    monkeypatch.setenv("KINK_THREADS", "1")
    rc, out, _ = run(sweep_args(), capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rc == 0 and len(rows) == 9
    assert all(r["status"] == "ok" and r["regime"] == "H1" for r in rows)
    assert max(float(r["max_sum_rule_residual"]) for r in rows) < 1e-12


def test_sweep_deterministic_across_threads(capsys, monkeypatch):
    outs = []
    for n in ("1", "3", "3"):
        monkeypatch.setenv("KINK_THREADS", n)
        outs.append(run(sweep_args(), capsys)[1])
    assert outs[0] == outs[1] == outs[2]


def test_sweep_flags_boundary_and_invalid(capsys, monkeypatch):
    monkeypatch.setenv("KINK_THREADS", "1")
    rc, out, _ = run(["sweep", "--sigma2-sq", "0.25", "--sigma3-sq", "0.5", "--alpha-bar-sq-grid", "0.5,0.75,2"], capsys)
    assert [r["status"] for r in csv.DictReader(io.StringIO(out))] == ["degenerate", "degenerate"]
    rc, out, _ = run(["sweep", "--sigma2-sq-grid", "0.25,0.75,2", "--sigma3-sq", "0.5", "--alpha-bar-sq", "0.6"], capsys)
    assert rc == 0
    assert [r["status"] for r in csv.DictReader(io.StringIO(out))] == ["ok", "invalid"]


def test_kink_threads(monkeypatch):
    monkeypatch.setenv("KINK_THREADS", "3")
    assert cli.sweep_threads() == 3
    monkeypatch.setenv("KINK_THREADS", "zero")
    with pytest.raises(ValidationError):
        cli.sweep_threads()


def test_count_general(capsys):
    rc, out, _ = run(["count-general", "--N", "3", "--single-hole", "2"], capsys)
    rep = parse_report(out)
    assert rep["count.cartesian_count"] == rep["count.single_alpha_formula"] == "8"
    rc, out, _ = run(["count-general", "--N", "3", "--hole", "1:0.2", "--hole", "2:0.5"], capsys)
    assert rc == 0 and parse_report(out)["count.elliptic_count"] == "5"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kinkmanifold", "classify", *H1], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "H1"


def test_energy_report_params_and_family(capsys):
    rc, out, _ = run(["energy", *H1, "--family", "Ts2_v1v2"], capsys)
    rep = parse_report(out)
    assert rc == 0
    assert (rep["params.sigma2_sq"], rep["params.sigma3_sq"], rep["params.alpha_bar_sq"]) == ("0.25", "0.5", "0.6")
    assert float(rep["energies.Ts2_v1v2.relative_gap"]) < 1e-4


def test_solve_from_start_point(capsys):
    rc, out, _ = run(["solve", *H1, "--start", "0", "0.500001", "0.750001", "--sector", "010"], capsys)
    rep = parse_report(out)
    assert rep["trajectory.start_vacuum"] == "v1" and rep["trajectory.end_vacuum"] == "v3"
