"""Command line: ``arealaw {run,audit,report} --config PATH --out DIR``.

Exit status is 0 when every asserted invariant holds, 1 when one fails and
2 for usage, schema or size-cap errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import CapExceeded, ContractError
from .experiments import run_experiment

log = logging.getLogger("arealaw")

SCHEMA_VERSION = 1


class ConfigError(Exception):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("arealaw").joinpath("schema/experiment.schema.json").read_text())


def load_config(path: str | Path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {e.message}") from e


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def execute(cfg: dict, out: Path, threads: int = 1) -> int:
    out.mkdir(parents=True, exist_ok=True)
    name = cfg["experiment"]
    t0 = time.perf_counter()
    cols, rows, inv = run_experiment(cfg, threads)
    elapsed = time.perf_counter() - t0
    rows = sorted(rows, key=lambda r: tuple(_sort_key(v) for v in r))
    write_csv(out / f"{name}.csv", cols, rows)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "model": cfg["model"],
        "invariants": inv,
        "passed": all(inv.values()),
        "rows": len(rows),
        "timings": {"total_seconds": round(elapsed, 3)},
    }
    (out / f"{name}.summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for k, ok in inv.items():
        log.info("%s %s: %s", name, k, "pass" if ok else "FAIL")
    return 0 if summary["passed"] else 1


def _sort_key(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return (0, float(v), "")
    return (1, 0.0, str(v))


def report(out: Path) -> int:
    summaries = sorted(out.glob("*.summary.json"))
    if not summaries:
        raise ConfigError(f"no experiment summaries in {out}")
    lines = ["# Experiment report", ""]
    status = 0
    for p in summaries:
        s = json.loads(p.read_text())
        lines.append(f"## {s['experiment']} ({s['model']['family']}, N={s['model']['N']})")
        lines.append("")
        lines.append("| invariant | result |")
        lines.append("|---|---|")
        for k, ok in sorted(s["invariants"].items()):
            lines.append(f"| {k} | {'pass' if ok else 'FAIL'} |")
            status |= 0 if ok else 1
        lines.append("")
        lines.append(f"rows: {s['rows']}, csv: {s['experiment']}.csv")
        lines.append("")
    (out / "report.md").write_text("\n".join(lines))
    print("\n".join(lines))
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arealaw", description="Truncation and area-law experiments for lattice models.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run the configured experiment"), ("audit", "check the growth conditions of the configured model")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", default=None, help="output directory (default: config 'output' or ./results)")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for grid points")
    rp = sub.add_parser("report", help="summarise the results in an output directory")
    rp.add_argument("--out", required=True)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "report":
            return report(Path(args.out))
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.command == "audit":
            cfg = dict(cfg, experiment="assumption_audit")
        out = Path(args.out or cfg.get("output", "results"))
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        return execute(cfg, out, args.threads)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CapExceeded as e:
        print(f"refused: {e}", file=sys.stderr)
        return 2
    except ContractError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
