import json

import pytest

from src.drkit.config_manager import RunConfig, RunConfigManager, overrides_from_flags, parse_model
from src.drkit.errors import ConfigError, FileIOError
from src.drkit.runlog import RunLog
from src.drkit.settings import DEFAULT_CONFIG_PATH, get_settings


def test_library_defaults_are_readable():
    settings = get_settings()
    assert settings.get("grids.heat.mass_times") == [0.25, 1.0, 4.0]
    assert settings.get("grids.nowhere.key", "fallback") == "fallback"
    assert settings.tolerance_defaults()["eikonal"] == pytest.approx(1e-10)
    assert DEFAULT_CONFIG_PATH.name == "drkit.yaml"


def test_config_dir_from_environment(tmp_path, monkeypatch):
    (tmp_path / "drkit.yaml").write_text("tolerances:\n  mass: 0.5\n", encoding="utf-8")
    monkeypatch.setenv("DRKIT_CONFIG_DIR", str(tmp_path))
    assert get_settings().tolerance_defaults() == {"mass": 0.5}


def test_model_strings(tmp_path):
    assert parse_model("heisenberg(2)").dim_v == 4
    assert parse_model(" quaternionic(1) ").dim_z == 3
    bracket = tmp_path / "b.json"
    bracket.write_text(json.dumps({"dim_v": 2, "dim_z": 1, "entries": [[1, 2, 1, 1.0], [2, 1, 1, -1.0]]}))
    assert parse_model(f"custom({bracket})").Q == 2.0
    with pytest.raises(ConfigError):
        parse_model("octonionic(1)")


def test_run_config_normalises_suites():
    config = RunConfig(suites=["heat", "group", "heat"])
    assert config.suites == ["group", "heat"]


def test_tolerance_precedence():
    config = RunConfig(tolerances={"mass": 0.5, "all": 0.0})
    assert config.tolerance("mass") == 0.5
    assert config.tolerance("eikonal") == 0.0
    assert RunConfig().tolerance("eikonal") == pytest.approx(1e-10)
    with pytest.raises(ConfigError):
        RunConfig().tolerance("nonsense")


def test_manager_merges_file_and_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"model": "quaternionic(1)", "suites": ["riesz"], "tolerances": {"mass": 0.1}}))
    config = RunConfigManager().load(str(path), {"seed": 7, "tolerances": {"eikonal": 1e-8}})
    assert config.model == "quaternionic(1)"
    assert config.seed == 7
    assert config.tolerances == {"mass": 0.1, "eikonal": 1e-8}
    assert config.out_dir == "drkit_out"


@pytest.mark.parametrize(
    "payload",
    [
        {"suites": ["geometry", "astrology"]},
        {"suites": []},
        {"tolerances": {"mass": -1.0}},
        {"tolerances": {"no_such_check": 1.0}},
        {"model": "heisenberg"},
        {"colour": "blue"},
    ],
)
def test_invalid_run_configs(tmp_path, payload):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(ConfigError):
        RunConfigManager().load(str(path))


def test_run_config_file_errors(tmp_path):
    with pytest.raises(FileIOError):
        RunConfigManager().load(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfigManager().load(str(broken))


def test_overrides_from_flags():
    overrides = overrides_from_flags("heisenberg(2)", 3, "out", ["--tol.mass", "0.1", "--tol.all=0"])
    assert overrides == {"model": "heisenberg(2)", "seed": 3, "out_dir": "out", "tolerances": {"mass": 0.1, "all": 0.0}}
    assert overrides_from_flags() == {}
    with pytest.raises(ConfigError):
        overrides_from_flags(tolerance_flags=["--verbose"])
    with pytest.raises(ConfigError):
        overrides_from_flags(tolerance_flags=["--tol.mass=tight"])
    with pytest.raises(ConfigError):
        overrides_from_flags(tolerance_flags=["--tol.mass"])


def test_run_log_is_saved(tmp_path):
    log = RunLog(quiet=True)
    log.log("verify", "started", {"model": "heisenberg(1)"}, kind="start")
    path = log.save(tmp_path)
    entries = json.loads(path.read_text(encoding="utf-8"))
    assert path.name == "run_log.json"
    assert entries[0]["step"] == "verify" and entries[0]["data"] == {"model": "heisenberg(1)"}
    assert set(entries[0]) == {"timestamp", "step", "message", "data"}
