"""
命令行入口
drkit verify / drkit sweep

Exit codes: 0 every check passed, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config_manager import RunConfig, RunConfigManager, overrides_from_flags
from .errors import ConfigError, DrkitError, ErrorCategory, ValidationError, handle_errors
from .htype_group import HTypeAlgebra
from .report import write_csv, write_outputs
from .runlog import RunLog
from .settings import Settings, get_settings
from .suites import SWEEPS, CheckResult, SuiteContext, evaluate_sweep, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class VerifyOutcome:
    results: List[CheckResult]
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAILED


# ------------------------------------------------------------------ verify

def _run_one_suite(suite: str, alg: HTypeAlgebra, config: RunConfig, settings: Settings, log: RunLog) -> Tuple[SuiteContext, List[CheckResult]]:
    ctx = SuiteContext(alg, config, suite, settings)
    log.log(suite, "suite started", kind="info")
    results = run_suite(suite, ctx)
    for r in results:
        log.log(suite, f"{r.name}: {r.value:.3e} (threshold {r.threshold:.3e}) {r.status}", r.as_dict(), kind=r.status)
    return ctx, results


async def run_verify_async(config: RunConfig, settings: Optional[Settings] = None, log: Optional[RunLog] = None) -> VerifyOutcome:
    """Run the configured suites concurrently, each in a worker thread."""
    settings = settings or get_settings()
    log = log or RunLog()
    alg = config.algebra()
    log.log("verify", f"model {config.model}, suites {', '.join(config.suites)}", config.model_dump(), kind="start")
    finished = await asyncio.gather(
        *(asyncio.to_thread(_run_one_suite, suite, alg, config, settings, log) for suite in config.suites)
    )
    # assembly in suite-name order, independent of thread completion order
    results: List[CheckResult] = []
    tables: Dict[str, List[Dict[str, Any]]] = {}
    for ctx, suite_results in sorted(finished, key=lambda pair: pair[0].suite):
        results.extend(suite_results)
        for name, rows in ctx.tables.items():
            tables.setdefault(name, []).extend(rows)
    return VerifyOutcome(results, tables)


def run_verify(config: RunConfig, settings: Optional[Settings] = None, log: Optional[RunLog] = None) -> VerifyOutcome:
    """Run, write report.json, CSV tables, summary.md and run_log.json to ``config.out_dir``."""
    log = log or RunLog()
    outcome = asyncio.run(run_verify_async(config, settings, log))
    outcome.files = write_outputs(config.out_dir, config.model_dump(), outcome.results, outcome.tables)
    if outcome.passed:
        log.log("verify", f"all {len(outcome.results)} checks passed", kind="pass")
    else:
        failed = [f"{r.suite}/{r.name}" for r in outcome.results if not r.passed]
        log.log("verify", f"{len(failed)} checks failed: {', '.join(failed)}", failed, kind="fail")
    log.log("verify", f"wrote {len(outcome.files)} files to {config.out_dir}", [str(p) for p in outcome.files], kind="files")
    outcome.files.append(log.save(config.out_dir))
    return outcome


# ------------------------------------------------------------------- sweep

_RANGE_PATTERN = re.compile(r"^(?:(?P<name>[A-Za-z_]\w*)=)?(?P<body>.*)$")


def parse_range(spec: str) -> Tuple[Optional[str], List[float]]:
    """'name=v1,v2,...', 'name=lo:hi:num' or 'name=geom:lo:hi:num'; the name is optional."""
    match = _RANGE_PATTERN.match(spec.strip())
    name, body = match.group("name"), match.group("body").strip()
    if not body:
        return name, []
    try:
        if body.startswith("geom:"):
            lo, hi, num = body[len("geom:"):].split(":")
            if float(lo) <= 0 or float(hi) <= 0:
                raise ConfigError(f"geometric range needs positive ends: {spec!r}")
            return name, [float(v) for v in np.geomspace(float(lo), float(hi), int(num))]
        if ":" in body:
            lo, hi, num = body.split(":")
            return name, [float(v) for v in np.linspace(float(lo), float(hi), int(num))]
        return name, [float(v) for v in body.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"malformed range {spec!r}") from exc


def parse_fixed(items: Sequence[str]) -> Dict[str, str]:
    fixed: Dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects name=value, got {item!r}")
        fixed[key.strip()] = value.strip()
    return fixed


def run_sweep(config: RunConfig, quantity: str, range_spec: str, fixed: Optional[Dict[str, str]] = None, log: Optional[RunLog] = None) -> Path:
    """Evaluate ``quantity`` on the range and write ``<out_dir>/<quantity>.csv``."""
    log = log or RunLog()
    if quantity not in SWEEPS:
        raise ConfigError(f"unknown sweep quantity {quantity!r}; known: {', '.join(sorted(SWEEPS))}")
    name, values = parse_range(range_spec)
    sweep = SWEEPS[quantity]
    if name is not None and name != sweep.parameter:
        raise ConfigError(f"{quantity} sweeps over {sweep.parameter!r}, not {name!r}")
    log.log("sweep", f"{quantity} over {len(values)} values of {sweep.parameter}", {"values": values, "fixed": fixed or {}}, kind="start")
    rows = evaluate_sweep(config.algebra(), quantity=quantity, values=values, fixed=fixed)
    path = write_csv(Path(config.out_dir) / f"{quantity}.csv", rows, sweep.columns)
    log.log("sweep", f"wrote {len(rows)} rows to {path}", kind="files")
    return path


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drkit", description="Numerical verification harness for harmonic analysis on Damek-Ricci spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="run configuration (JSON)")
        p.add_argument("--model", help="heisenberg(d), quaternionic(n) or custom(path)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--quiet", action="store_true", help="no console status lines")

    verify = sub.add_parser("verify", help="run the verification suites", epilog="tolerances: --tol.<name>=<value> (--tol.all sets every one)")
    common(verify)
    verify.add_argument("--suites", help="comma separated subset of the suites")

    sweep = sub.add_parser("sweep", help="tabulate one quantity over a parameter range")
    common(sweep)
    sweep.add_argument("--quantity", required=True, help=", ".join(sorted(SWEEPS)))
    sweep.add_argument("--range", dest="range_spec", required=True, help="name=v1,v2 | name=lo:hi:num | name=geom:lo:hi:num")
    sweep.add_argument("--set", dest="fixed", action="append", default=[], help="fixed parameter name=value")
    return parser


def _load_config(args: argparse.Namespace, extra: Sequence[str], settings: Settings) -> RunConfig:
    out = args.out or os.getenv("DRKIT_OUT_DIR")
    overrides = overrides_from_flags(args.model, args.seed, out, extra)
    if getattr(args, "suites", None):
        overrides["suites"] = [s.strip() for s in args.suites.split(",") if s.strip()]
    config = RunConfigManager(settings).load(args.config, overrides)
    config.algebra()
    return config


def load_config(args: argparse.Namespace, extra: Sequence[str], settings: Settings) -> RunConfig:
    """Validated run configuration; errors are echoed to stderr unless --quiet."""
    guarded = handle_errors(ErrorCategory.CONFIG, log_errors=not args.quiet)(_load_config)
    return guarded(args, extra, settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    settings = get_settings()
    log = RunLog(quiet=args.quiet)
    if args.command == "sweep" and extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        config = load_config(args, extra, settings)
    except DrkitError:
        return EXIT_USAGE

    if args.command == "verify":
        try:
            return run_verify(config, settings, log).exit_code
        except DrkitError as exc:
            log.log("verify", exc.message, kind="error")
            return EXIT_FAILED
    try:
        run_sweep(config, args.quantity, args.range_spec, parse_fixed(args.fixed), log)
    except (ConfigError, ValidationError) as exc:
        log.log("sweep", exc.message, kind="error")
        return EXIT_USAGE
    except DrkitError as exc:
        log.log("sweep", exc.message, kind="error")
        return EXIT_FAILED
    return EXIT_OK
