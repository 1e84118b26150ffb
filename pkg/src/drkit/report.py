"""
报告输出
report.json, per-table CSV files and a markdown summary of a verification run.

report.json carries no timestamps so that a rerun with the same config and
seed reproduces it byte for byte; timestamps live in the run log.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .errors import FileIOError, safe_execute
from .settings import DEFAULT_CONFIG_PATH
from .suites import CheckResult

TEMPLATE_DIR = DEFAULT_CONFIG_PATH.parent.parent / "templates"
SUMMARY_TEMPLATE = "report_summary.md.j2"


def to_jsonable(value: Any) -> Any:
    """numpy scalars and arrays to plain Python; inf and nan become strings."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def build_report(config: Mapping[str, Any], results: Sequence[CheckResult]) -> Dict[str, Any]:
    ordered = sorted(results, key=lambda r: r.suite)
    counts = {status: sum(r.status == status for r in ordered) for status in ("pass", "fail", "inconclusive", "error")}
    return {
        "config": to_jsonable(dict(config)),
        "summary": {
            "checks": len(ordered),
            **counts,
            "passed": all(r.passed for r in ordered),
            "failures": [f"{r.suite}/{r.name}" for r in ordered if not r.passed],
        },
        "checks": [to_jsonable(r.as_dict()) for r in ordered],
    }


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileIOError("could not write report", file_path=str(path), cause=exc) from exc
    return path


def write_csv(path: Path, rows: Iterable[Mapping[str, Any]], fields: Sequence[str] = ()) -> Path:
    """UTF-8, comma separated, header row; columns are ``fields`` or the union of row keys."""
    rows = list(rows)
    columns: List[str] = list(fields)
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_cell(row.get(k, "")) for k in columns})
    except OSError as exc:
        raise FileIOError("could not write CSV table", file_path=str(path), cause=exc) from exc
    return path


def _csv_cell(value: Any) -> Any:
    value = to_jsonable(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, float):
        return repr(value)
    return value


def render_summary(report: Mapping[str, Any], template_dir: Path = TEMPLATE_DIR) -> str:
    env = Environment(loader=FileSystemLoader(str(template_dir)), undefined=StrictUndefined, trim_blocks=True, lstrip_blocks=True)
    return env.get_template(SUMMARY_TEMPLATE).render(report=report)


def write_outputs(
    out_dir: str | Path,
    config: Mapping[str, Any],
    results: Sequence[CheckResult],
    tables: Mapping[str, Sequence[Mapping[str, Any]]],
) -> List[Path]:
    """Write report.json, one CSV per table and summary.md; return the paths written."""
    out = Path(out_dir)
    report = build_report(config, results)
    written = [write_json(out / "report.json", report)]
    for name in sorted(tables):
        written.append(write_csv(out / f"{name}.csv", tables[name]))
    # summary.md is best effort
    summary = safe_execute(render_summary, report)
    if summary is not None:
        path = out / "summary.md"
        path.write_text(summary, encoding="utf-8")
        written.append(path)
    return written
