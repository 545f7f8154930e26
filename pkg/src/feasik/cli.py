"""Command-line front end.

Exit codes: 0 success / feasible, 1 configuration error, 2 solver hit the
iteration budget, 3 reproduction mismatch, 4 certificate violations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import config as cfgmod
from .certificates import REPRODUCTIONS, check_descent
from .engine import solve, write_trace_csv
from .errors import FeasikError

SEED_ENV = "FEASIK_SEED"


def _seed_override(args) -> int | None:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else None


def _load(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return cfgmod.parse_document(fh.read())


def cmd_solve(args) -> int:
    doc = _load(args.config)
    run = cfgmod.build_run_config(doc, seed_override=_seed_override(args))
    result = solve(run)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            write_trace_csv(result.trace, run.problem.dim, fh)
    k = result.k_feasible if result.feasible else "MAX"
    print(f"status={result.status} k_feasible={k} corrections={result.corrections}")
    if args.verbose:
        x = ", ".join(repr(float(v)) for v in result.final)
        print(f"final=[{x}]")
    return 0 if result.feasible else 2


def cmd_certify(args) -> int:
    doc = _load(args.config)
    run = cfgmod.build_run_config(doc, seed_override=_seed_override(args))
    if run.problem.interior is None:
        raise FeasikError("certify needs problem.interior = {z, R}")
    z, big_r = run.problem.interior
    lam = run.weights.floor(run.control.max_card)
    result = solve(run)
    cert = check_descent(result, z, big_r, lam, outer=run.problem.outer)
    report = {"status": result.status, "k_feasible": result.k_feasible,
              "certificate": cert.to_dict()}
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(cfgmod.emit_document(report))
    print(f"status={result.status} steps={len(result.trace) - 1} "
          f"applicable={cert.applicable_count} "
          f"min_slack={cert.min_slack if cert.min_slack is not None else 'n/a'} "
          f"violations={len(cert.violations)}")
    shown = [e for e in cert.entries if e.applicable][:10]
    if shown:
        print(f"{'k':>6} {'rho':>12} {'slack':>14} ok")
        for e in shown:
            print(f"{e.k:>6} {e.rho:>12.6g} {e.slack:>14.6g} {e.ok}")
    return 0 if cert.ok else 4


def cmd_reproduce(args) -> int:
    fn = REPRODUCTIONS[args.which]
    report = fn()
    for line in report.lines():
        print(line)
    return 0 if report.ok else 3


def _sweep_one(payload):
    row_id, doc, control_doc, phi_kind, timing = payload
    run_doc = dict(doc)
    run_doc["control"] = control_doc
    run_doc["phi"] = phi_kind
    run = cfgmod.build_run_config(run_doc)
    t0 = time.perf_counter()
    result = solve(run)
    dt = time.perf_counter() - t0
    over = run_doc["overrelaxation"]["kind"]
    row = [row_id, control_doc["kind"], phi_kind, over,
           str(result.k_feasible) if result.feasible else "MAX",
           str(result.corrections)]
    row.append(f"{dt:.6f}" if timing else "")
    return row


def cmd_sweep(args) -> int:
    grid = _load(args.config)
    instances = grid.get("instances", [])
    controls = grid.get("controls", [])
    phis = grid.get("phis", ["one"])
    base = grid.get("base", {})
    jobs = []
    for n, inst in enumerate(instances):
        for c in controls:
            for p in phis:
                doc = dict(base)
                doc.update(inst)
                jobs.append((f"instance{n}", doc, c, p, args.timing))
    if not jobs:
        raise FeasikError("empty sweep grid")
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    header = "instance,control,phi,overrelaxation,k_feasible,corrections,wall_time"
    lines = [header] + [",".join(r) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(rows)} runs", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    doc = _load(args.config)
    run = cfgmod.build_run_config(doc, seed_override=_seed_override(args))
    print(f"OK dim={run.problem.dim} m={run.problem.m} "
          f"control={doc['control']['kind']} counter={run.counter_mode}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="feasik",
        description="Finitely convergent projection methods for convex feasibility")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a config and write the trace CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="trace CSV path")
    p.add_argument("--seed", type=int, help="override the random-control seed")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("certify", help="solve, then check the descent inequality")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="JSON report path")
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("reproduce", help="rerun a counterexample against its oracle")
    p.add_argument("which", choices=sorted(REPRODUCTIONS))
    p.set_defaults(fn=cmd_reproduce)

    p = sub.add_parser("sweep", help="run a controls x phis x instances grid")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="results CSV path")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="include wall time (output then varies across reruns)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("validate", help="parse and validate a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FeasikError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
