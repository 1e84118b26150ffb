"""Centralised library defaults for drkit, read from ``config/drkit.yaml``."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigError

_PACKAGE_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = _PACKAGE_ROOT / "config" / "drkit.yaml"


@dataclass(frozen=True)
class Settings:
    """Numeric defaults: quadrature, grids, bands and check tolerances."""

    base: Dict[str, Any]

    def section(self, name: str) -> Dict[str, Any]:
        """Return a copy of one top-level section (empty when missing)."""

        value = self.base.get(name, {})
        return dict(value) if isinstance(value, dict) else {}

    def get(self, dotted_key: str, default: Any = None) -> Any:
        value: Any = self.base
        for part in dotted_key.split("."):
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default
        return value

    def tolerance_defaults(self) -> Dict[str, float]:
        return {name: float(value) for name, value in self.section("tolerances").items()}

    def band(self, name: str, default: float = 10.0) -> float:
        return float(self.get(f"bands.{name}", default))


def get_settings(config_path: Optional[str] = None) -> Settings:
    """Load and cache the library defaults.

    ``DRKIT_CONFIG_DIR`` overrides the directory holding ``drkit.yaml``.
    """

    if config_path is None:
        env_dir = os.getenv("DRKIT_CONFIG_DIR")
        config_path = str(Path(env_dir) / "drkit.yaml") if env_dir else str(DEFAULT_CONFIG_PATH)
    return _load_settings_cached(_resolve_path(config_path))


@lru_cache(maxsize=None)
def _load_settings_cached(config_path: Optional[str]) -> Settings:
    return Settings(base=_read_yaml(config_path))


def _resolve_path(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    return str(Path(path).expanduser().resolve())


def _read_yaml(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    file_path = Path(path)
    if not file_path.exists():
        return {}
    with file_path.open("r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ConfigError(
            f"Expected mapping at {file_path}, got {type(data).__name__}",
            config_file=str(file_path),
        )
    return data
