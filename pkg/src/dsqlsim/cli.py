"""Command-line front end: ``dsqlsim run <scenario>``, ``dsqlsim list``, ``dsqlsim version``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import DomainError, InfeasibleError, NoiseSaturationError, SuperSynchronousError
from .experiments import run_experiment
from .scenario import ScenarioError, bundled_scenarios, load_scenario, resolve

EXIT_OK, EXIT_INPUT, EXIT_PHYSICS = 0, 1, 2
THREADS_ENV = "DSQL_SIM_THREADS"


def format_value(x) -> str:
    """Nine significant digits; non-finite values spelled inf, -inf, nan."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def write_csv(table: dict, path: Path) -> None:
    cols = list(table)
    data = [np.asarray(table[c], dtype=float) for c in cols]
    lines = [",".join(cols)]
    for i in range(len(data[0])):
        lines.append(",".join(format_value(col[i]) for col in data))
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def write_json_table(table: dict, path: Path) -> None:
    cols = list(table)
    data = [np.asarray(table[c], dtype=float) for c in cols]
    rows = [{c: _jsonable(col[i]) for c, col in zip(cols, data)} for i in range(len(data[0]))]
    path.write_text(json.dumps(rows, indent=1) + "\n", encoding="ascii")


def _jsonable(x):
    """Floats rounded to 9 significant digits; non-finite values become strings."""
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)) or x is None or isinstance(x, str):
        return bool(x) if isinstance(x, np.bool_) else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    return float(format(x, ".9g")) if math.isfinite(x) else format_value(x)


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ScenarioError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if n < 1:
            raise ScenarioError(f"{THREADS_ENV} must be at least 1")
        return n
    return os.cpu_count() or 1


def cmd_run(args) -> int:
    start = time.perf_counter()
    sc = load_scenario(resolve(args.scenario))
    seed = args.seed if args.seed is not None else sc.seed
    if sc.experiment == "teleport-map" and seed is None:
        raise ScenarioError("this experiment needs a seed", None, sc.source)
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        raise ScenarioError("--threads must be at least 1")
    out_dir = Path(args.output_dir or sc.output or ".")
    outcome = run_experiment(sc, seed, threads)

    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / f"{sc.name}.{args.format}"
    (write_csv if args.format == "csv" else write_json_table)(outcome.table, table_path)
    summary = {
        "toolkit": "dsqlsim",
        "version": __version__,
        "scenario": sc.name,
        "experiment": sc.experiment,
        "scenario_hash": sc.digest,
        "seed": seed,
        "threads": threads,
        "rows": len(next(iter(outcome.table.values()))),
        "wall_time_s": time.perf_counter() - start,
        "results": outcome.summary,
    }
    (out_dir / f"{sc.name}.summary.json").write_text(
        json.dumps(_jsonable(summary), indent=2) + "\n", encoding="ascii")
    print(f"{sc.name}: wrote {table_path} ({summary['rows']} rows)")
    return EXIT_OK


def cmd_list(args) -> int:
    catalog = bundled_scenarios()
    width = max(len(n) for n in catalog)
    for name, (_, note) in catalog.items():
        print(f"{name:<{width}}  {note}")
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"dsqlsim {__version__}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for infeasible physics."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dsqlsim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or bundled scenario name")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--threads", type=int,
                     help=f"worker processes (default: ${THREADS_ENV} or all cores)")
    run.add_argument("--output-dir", help="override the scenario output directory")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.set_defaults(func=cmd_run)
    sub.add_parser("list", help="list bundled scenarios").set_defaults(func=cmd_list)
    sub.add_parser("version", help="print the toolkit version").set_defaults(func=cmd_version)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleError, NoiseSaturationError, SuperSynchronousError) as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        where = getattr(args, "scenario", "")
        print(f"error: {where}: invalid value: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
