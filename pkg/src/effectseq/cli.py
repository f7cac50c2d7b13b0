"""Command line entry point: ``effectseq list | run | axioms``.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .effects import check_axioms
from .scenarios import REGISTRY, ScenarioParamError, ScenarioResult, run_scenario

SCHEMA_VERSION = "1"
EXIT = {"pass": 0, "fail": 1, "inconclusive": 2}
EXIT_USAGE = 3


@dataclass
class RunConfig:
    scenario: str = ""
    dim: int = 8
    n_max: int = 200
    tol: float = 1e-6
    seed: int = 42
    tail_fraction: float = 0.5
    format: str = "json"
    out: Optional[str] = None


class UsageError(Exception):
    pass


# -- canonical serialization -----------------------------------------------

def _plain(obj):
    """Reduce to JSON-compatible builtins; complex numbers become [re, im]."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        if obj.imag == 0:
            return float(obj.real)
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "__dataclass_fields__"):
        return _plain(asdict(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return _fmt_float(o)
        return json.dumps(o, ensure_ascii=False)

    return enc(_plain(obj), 0) + "\n"


def build_report(result: ScenarioResult, config: RunConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario": result.scenario,
        "config": asdict(config),
        "params": result.params,
        "claims": [
            {"claim_id": c.claim_id, "expected": c.expected, "observed": c.observed, "witness": c.witness}
            for c in result.claims
        ],
        "findings": [{"claim": f.claim, "status": f.status, "evidence": f.evidence} for f in result.findings],
        "traces": [{"series_id": k, "points": [[n, v] for n, v in pts]} for k, pts in sorted(result.traces.items())],
        "exit_status": result.status,
    }


def traces_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", "series_id", "n", "value"])
    for tr in report["traces"]:
        for n, v in tr["points"]:
            w.writerow([report["scenario"], tr["series_id"], _plain(n), _fmt_float(float(v))])
    return buf.getvalue()


# -- commands --------------------------------------------------------------

def cmd_list(out=None) -> int:
    out = out or sys.stdout
    width = max(map(len, REGISTRY))
    for name, s in REGISTRY.items():
        print(f"{name:<{width}}  {s.description}  [{s.anchor}]", file=out)
    return 0


def _emit(report: dict, fmt: str, out_path: Optional[str]) -> None:
    text = dumps(report) if fmt == "json" else traces_csv(report)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(config: RunConfig) -> int:
    if config.scenario not in REGISTRY:
        raise UsageError(f"unknown scenario {config.scenario!r}; try 'list'")
    result = run_scenario(
        config.scenario,
        dim=config.dim,
        n_max=config.n_max,
        tol=config.tol,
        seed=config.seed,
        tail_fraction=config.tail_fraction,
    )
    report = build_report(result, config)
    _emit(report, config.format, config.out)
    return EXIT[result.status]


def cmd_axioms(dim: int, trials: int, seed: int, tol: float, fmt: str = "json", out: Optional[str] = None) -> int:
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    reports = check_axioms(dims=[dim], trials=trials, seed=seed, tol_per_dim=tol)
    status = "pass" if all(r.passed for r in reports) else "fail"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": "axioms",
        "config": {"dim": dim, "trials": trials, "seed": seed, "tol": tol, "format": fmt, "out": out},
        "params": {"tol_per_dim": tol},
        "claims": [
            {
                "claim_id": r.axiom_id,
                "expected": "Holds",
                "observed": "Holds" if r.passed else "Violated",
                "witness": {"trials": r.trials, "max_residual": r.max_residual, "failures": r.to_dict()["failures"]},
            }
            for r in reports
        ],
        "findings": [],
        "traces": [],
        "axioms": [r.to_dict() for r in reports],
        "exit_status": status,
    }
    _emit(doc, fmt, out)
    return EXIT[status]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_tol() -> float:
    env = os.environ.get("EFFECTSEQ_TOL")
    if env is None:
        return RunConfig.tol
    try:
        return float(env)
    except ValueError:
        raise UsageError(f"EFFECTSEQ_TOL={env!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="effectseq", description="Sequential product continuity checks on finite-dimensional effects.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="list registered scenarios")

    run = sub.add_parser("run", help="run one scenario and emit its report")
    run.add_argument("name", nargs="?", help="scenario name (alternative to --scenario)")
    run.add_argument("--scenario")
    run.add_argument("--dim", type=int, default=RunConfig.dim)
    run.add_argument("--n-max", type=int, default=RunConfig.n_max)
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--seed", type=int, default=RunConfig.seed)
    run.add_argument("--tail-fraction", type=float, default=RunConfig.tail_fraction)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--out")

    ax = sub.add_parser("axioms", help="run the effect-algebra axiom suites")
    ax.add_argument("--dim", type=int, default=2)
    ax.add_argument("--trials", type=int, default=100)
    ax.add_argument("--seed", type=int, default=RunConfig.seed)
    ax.add_argument("--tol", type=float, default=1e-9, help="residual tolerance per dimension")
    ax.add_argument("--format", choices=("json",), default="json")
    ax.add_argument("--out")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "list":
            return cmd_list()
        if args.command == "axioms":
            if args.dim < 1:
                raise UsageError("--dim must be >= 1")
            return cmd_axioms(args.dim, args.trials, args.seed, args.tol, args.format, args.out)
        name = args.scenario or args.name
        if not name:
            raise UsageError("run needs a scenario name")
        if args.dim < 1 or args.n_max < 1 or not 0 < args.tail_fraction <= 1:
            raise UsageError("--dim and --n-max must be positive, --tail-fraction in (0, 1]")
        if args.seed < 0 or args.seed >= 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        config = RunConfig(
            scenario=name,
            dim=args.dim,
            n_max=args.n_max,
            tol=args.tol if args.tol is not None else _default_tol(),
            seed=args.seed,
            tail_fraction=args.tail_fraction,
            format=args.format,
            out=args.out,
        )
        return cmd_run(config)
    except (UsageError, ScenarioParamError) as e:
        print(f"effectseq: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
