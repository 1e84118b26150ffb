"""
运行配置管理器
Run Configuration Manager

JSON 运行配置 + 命令行覆盖，经 pydantic 校验
A run config is the library defaults, deep-merged with a JSON file and then
with command-line overrides, validated into a RunConfig.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as PydanticValidationError

from .errors import ConfigError, FileIOError
from .htype_group import HTypeAlgebra, build_algebra, load_algebra_json
from .settings import Settings, get_settings

SuiteName = Literal["group", "geometry", "heat", "riesz", "gelfand", "symbols"]
SUITE_NAMES: tuple[str, ...] = ("group", "geometry", "heat", "riesz", "gelfand", "symbols")
ALL_TOLERANCES = "all"

_MODEL_PATTERN = re.compile(r"^(heisenberg|quaternionic)\((\d+)\)$|^custom\((.+)\)$")


def parse_model(text: str) -> HTypeAlgebra:
    """'heisenberg(d)', 'quaternionic(n)' or 'custom(path/to/bracket.json)'."""
    match = _MODEL_PATTERN.match(text.strip())
    if not match:
        raise ConfigError(f"malformed model string {text!r}")
    kind, size, path = match.groups()
    if path is not None:
        return load_algebra_json(path)
    return build_algebra(kind, int(size))


class RunConfig(BaseModel):
    """运行配置"""

    model_config = ConfigDict(extra="forbid")

    model: str = "heisenberg(1)"
    suites: List[SuiteName] = Field(default_factory=lambda: list(SUITE_NAMES), min_length=1)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    seed: int = 0
    out_dir: str = "drkit_out"

    @field_validator("model")
    @classmethod
    def _model_shape(cls, value: str) -> str:
        if not _MODEL_PATTERN.match(value.strip()):
            raise ValueError(f"model must be heisenberg(d), quaternionic(n) or custom(path), got {value!r}")
        return value.strip()

    @field_validator("suites")
    @classmethod
    def _unique_suites(cls, value: List[str]) -> List[str]:
        # duplicates dropped; reports are ordered by suite name
        return sorted(dict.fromkeys(value))

    @field_validator("tolerances")
    @classmethod
    def _non_negative(cls, value: Dict[str, float]) -> Dict[str, float]:
        negative = [name for name, tol in value.items() if tol < 0]
        if negative:
            raise ValueError(f"tolerances must be non-negative: {', '.join(sorted(negative))}")
        return value

    def algebra(self) -> HTypeAlgebra:
        return parse_model(self.model)

    def tolerance(self, name: str, settings: Optional[Settings] = None) -> float:
        """Run override, then the run-wide ``all`` override, then the library default."""
        if name in self.tolerances:
            return float(self.tolerances[name])
        if ALL_TOLERANCES in self.tolerances:
            return float(self.tolerances[ALL_TOLERANCES])
        defaults = (settings or get_settings()).tolerance_defaults()
        if name not in defaults:
            raise ConfigError(f"no tolerance named {name!r}")
        return defaults[name]


class RunConfigManager:
    """运行配置管理器"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def load(self, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """Defaults <- JSON file <- overrides, then validate."""
        merged = self._deep_merge(self.settings.section("run_defaults"), self._load_json(path))
        merged = self._deep_merge(merged, overrides or {})
        try:
            config = RunConfig.model_validate(merged)
        except PydanticValidationError as exc:
            raise ConfigError(f"invalid run configuration: {exc.errors()[0]['msg']}", config_file=path, cause=exc) from exc
        unknown = set(config.tolerances) - set(self.settings.tolerance_defaults()) - {ALL_TOLERANCES}
        if unknown:
            raise ConfigError(f"unknown tolerance names: {', '.join(sorted(unknown))}", config_file=path)
        return config

    def _load_json(self, path: Optional[str]) -> Dict[str, Any]:
        """加载JSON文件"""
        if not path:
            return {}
        file_path = Path(path)
        if not file_path.exists():
            raise FileIOError("run configuration not found", file_path=str(file_path))
        try:
            data = json.loads(file_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"run configuration is not valid JSON: {exc}", config_file=str(file_path)) from exc
        if not isinstance(data, dict):
            raise ConfigError(f"Expected mapping at {file_path}, got {type(data).__name__}", config_file=str(file_path))
        return data

    def _deep_merge(self, dict1: Dict, dict2: Dict) -> Dict:
        """深度合并字典"""
        result = dict1.copy()

        for key, value in dict2.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result


def overrides_from_flags(
    model: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    tolerance_flags: Sequence[str] = (),
) -> Dict[str, Any]:
    """Turn --model/--seed/--out and leftover ``--tol.<name>[=value]`` tokens into a merge dict."""
    overrides: Dict[str, Any] = {}
    if model is not None:
        overrides["model"] = model
    if seed is not None:
        overrides["seed"] = seed
    if out is not None:
        overrides["out_dir"] = out
    tolerances: Dict[str, float] = {}
    tokens = list(tolerance_flags)
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--tol."):
            raise ConfigError(f"unrecognised argument {token!r}")
        name, sep, value = token[len("--tol."):].partition("=")
        if not sep:
            if i + 1 >= len(tokens):
                raise ConfigError(f"missing value for {token}")
            i += 1
            value = tokens[i]
        try:
            tolerances[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"tolerance {name!r} is not a number: {value!r}") from exc
        i += 1
    if tolerances:
        overrides["tolerances"] = tolerances
    return overrides
