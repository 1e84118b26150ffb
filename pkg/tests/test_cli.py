import csv
import json
from pathlib import Path

import pytest

from src.drkit.cli import main, parse_fixed, parse_range
from src.drkit.errors import ConfigError

REPO_ROOT = Path(__file__).resolve().parents[1]


def _verify(tmp_path, *extra):
    return main(["verify", "--suites", "group", "--out", str(tmp_path), "--quiet", *extra])


def test_parse_range_forms():
    assert parse_range("t=0.5,1,2") == ("t", [0.5, 1.0, 2.0])
    assert parse_range("0:1:3") == (None, [0.0, 0.5, 1.0])
    name, values = parse_range("lambda=geom:0.01:100:5")
    assert name == "lambda" and values == pytest.approx([0.01, 0.1, 1.0, 10.0, 100.0])
    assert parse_range("t=") == ("t", [])
    for bad in ("t=1:2", "t=a,b", "t=geom:0:1:3"):
        with pytest.raises(ConfigError):
            parse_range(bad)


def test_parse_fixed():
    assert parse_fixed(["epsilon=0.5", " which = gradient"]) == {"epsilon": "0.5", "which": "gradient"}
    with pytest.raises(ConfigError):
        parse_fixed(["epsilon"])


def test_verify_group_suite(tmp_path):
    assert _verify(tmp_path) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["summary"]["passed"] is True
    assert {c["name"] for c in report["checks"]} == {"htype_identity", "group_axioms"}
    assert (tmp_path / "summary.md").exists()
    assert (tmp_path / "run_log.json").exists()


def test_report_is_reproducible(tmp_path):
    assert _verify(tmp_path, "--seed", "4") == 0
    first = (tmp_path / "report.json").read_bytes()
    assert _verify(tmp_path, "--seed", "4") == 0
    assert (tmp_path / "report.json").read_bytes() == first


def test_zero_tolerance_fails(tmp_path):
    assert _verify(tmp_path, "--tol.all=0") == 1
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["summary"]["fail"] >= 1


def test_non_htype_bracket_fails(tmp_path, monkeypatch):
    monkeypatch.chdir(REPO_ROOT)
    code = main(["verify", "--config", "config/non_htype_run.json", "--out", str(tmp_path), "--quiet"])
    assert code == 1
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert "group/htype_identity" in report["summary"]["failures"]


@pytest.mark.parametrize(
    "args",
    [
        ["--model", "heisenberg(0)"],
        ["--model", "octonionic(1)"],
        ["--suites", "group,astrology"],
        ["--tol.no_such_check=1"],
        ["--tol.mass=loose"],
        ["--config", "missing.json"],
    ],
)
def test_configuration_errors_exit_two(tmp_path, args):
    assert _verify(tmp_path, *args) == 2


def test_quiet_suppresses_error_echo(tmp_path, capsys):
    assert _verify(tmp_path, "--model", "octonionic(1)") == 2
    assert capsys.readouterr().err == ""
    assert main(["verify", "--suites", "group", "--out", str(tmp_path), "--model", "octonionic(1)"]) == 2
    assert "octonionic" in capsys.readouterr().err


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DRKIT_OUT_DIR", str(tmp_path / "env_out"))
    assert main(["verify", "--suites", "group", "--quiet"]) == 0
    assert (tmp_path / "env_out" / "report.json").exists()


def _read_csv(path):
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def test_sweep_phi_ratio(tmp_path):
    code = main(["sweep", "--quantity", "phi_ratio", "--range", "log_x=5,10,20,40", "--out", str(tmp_path), "--quiet"])
    assert code == 0
    rows = _read_csv(tmp_path / "phi_ratio.csv")
    assert [float(r["log_x"]) for r in rows] == [5.0, 10.0, 20.0, 40.0]
    errors = [float(r["error"]) for r in rows]
    assert errors == sorted(errors, reverse=True)


def test_sweep_empty_range_writes_header(tmp_path):
    assert main(["sweep", "--quantity", "mass", "--range", "t=", "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "mass.csv").read_text(encoding="utf-8").splitlines() == ["t,value"]


@pytest.mark.parametrize(
    "args",
    [
        ["--quantity", "entropy", "--range", "t=1"],
        ["--quantity", "mass", "--range", "lambda=1"],
        ["--quantity", "mass", "--range", "t=1:2"],
        ["--quantity", "weighted_l1", "--range", "t=1", "--set", "epsilon"],
        ["--quantity", "weighted_l1", "--range", "t=1", "--set", "epsilon=abc"],
        ["--quantity", "op_norm", "--range", "lambda=1", "--set", "N=3.5"],
        ["--quantity", "op_norm", "--range", "lambda=1", "--set", "lamda=2"],
    ],
)
def test_sweep_usage_errors(tmp_path, args):
    assert main(["sweep", *args, "--out", str(tmp_path), "--quiet"]) == 2


def test_sweep_out_of_domain_value_fails(tmp_path):
    args = ["sweep", "--quantity", "weighted_l1", "--range", "t=1", "--set", "epsilon=1.5", "--out", str(tmp_path), "--quiet"]
    assert main(args) == 1


def test_sweep_rejects_tolerance_flags(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--quantity", "mass", "--range", "t=1", "--tol.mass=1", "--out", str(tmp_path)])
    assert info.value.code == 2


@pytest.mark.slow
def test_default_verify_exits_zero(tmp_path, monkeypatch):
    monkeypatch.chdir(REPO_ROOT)
    assert main(["verify", "--config", "config/default_run.json", "--out", str(tmp_path), "--quiet"]) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["summary"]["passed"] is True
    assert len(report["checks"]) >= 12
    assert not [c for c in report["checks"] if c["status"] == "error"]


@pytest.mark.slow
def test_quaternionic_group_and_riesz_suites(tmp_path, monkeypatch):
    monkeypatch.chdir(REPO_ROOT)
    assert main(["verify", "--config", "config/quaternionic_run.json", "--out", str(tmp_path), "--quiet"]) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert {c["suite"] for c in report["checks"]} == {"group", "riesz"}
    assert report["config"]["model"] == "quaternionic(1)"
