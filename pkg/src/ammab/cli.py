"""Command line interface.

Subcommands:
  run     simulate an experiment spec and write CSV curves + a JSON manifest
  analyze print instance diagnostics as JSON
  verify  run the built-in solver/invariant self-checks
  sweep   grid over p and M, reporting final mean regret per cell
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, harness
from .model import InstanceConfig, ForcedSupport, MaxZeroArms, Unconstrained, cap
from .solver import (
    InfeasibleError,
    SolveRequest,
    brute_force,
    solve_forced_support,
    solve_sequential,
    value_of,
)


def _cmd_run(args) -> int:
    spec = harness.load_spec(args.spec)
    overrides = {}
    if args.reps is not None:
        overrides["replications"] = args.reps
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.stride is not None:
        overrides["record_stride"] = args.stride
    if args.policy:
        chosen = [p for p in spec.policies if p.name in args.policy]
        if not chosen:
            print(f"error: no spec policy matches {args.policy}", file=sys.stderr)
            return 1
        overrides["policies"] = tuple(chosen)
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    trace = harness.run_and_save(spec, args.out, jobs=args.jobs)
    for label, pt in trace.policies.items():
        print(f"{label}: final mean regret {pt.mean[-1]:.2f}")
    print(f"wrote results to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    spec = harness.load_spec(args.spec)
    diag = analysis.diagnose(spec.instance, tolerance=args.tolerance)
    r = diag.r
    if args.r_range == "positive":
        # restrict the minimization to constrained optima with at least one
        # arm removed; undefined when no arm is removed at the optimum
        if diag.nu_star == 0:
            print("error: positive r range is empty when nu_star = 0", file=sys.stderr)
            return 1
        r = analysis.compute_r(
            spec.instance,
            tolerance=args.tolerance,
            nu_range=tuple(range(1, diag.nu_star + 1)),
        )
    doc = {
        "nu_star": diag.nu_star,
        "gaps": list(diag.gaps),
        "delta_super": diag.delta_super if math.isfinite(diag.delta_super) else "inf",
        "r": r,
        "elimination_condition": diag.elimination_condition,
    }
    print(json.dumps(doc, indent=2))
    return 0


def _verify_solver(rng: np.random.Generator, n_instances: int) -> list[str]:
    failures = []
    for i in range(n_instances):
        K = int(rng.integers(2, 5))
        M = int(rng.integers(K, 9))
        p = float(rng.choice([0.05, 0.1, 0.3]))
        if M > K * cap(p):
            continue
        v = tuple(rng.random(K))
        req = SolveRequest(v, M, p, Unconstrained())
        gv = value_of(v, solve_sequential(req), p)
        bv = value_of(v, brute_force(req), p)
        if gv != bv:
            failures.append(f"unconstrained mismatch on {req}: {gv} vs {bv}")
        size = int(rng.integers(0, min(K, M) + 1))
        E = frozenset(int(x) for x in rng.choice(K, size=size, replace=False))
        freq = SolveRequest(v, M, p, ForcedSupport(E))
        fv = value_of(v, solve_forced_support(freq), p)
        fb = value_of(v, brute_force(freq), p)
        if fv != fb:
            failures.append(f"forced-support mismatch on {freq}: {fv} vs {fb}")
    return failures


def _verify_invariants(rng: np.random.Generator) -> list[str]:
    from .model import g
    failures = []
    for p in (0.05, 0.1, 0.3):
        c = cap(p)
        for m in range(1, c):
            lhs = g(m + 1, p) - g(m, p)
            rhs = g(m, p) - g(m - 1, p)
            if lhs > rhs + 1e-12:
                failures.append(f"concavity violated at m={m}, p={p}")
        for m in range(0, c):
            direct = g(m + 1, p) - g(m, p)
            closed = p * (1 - p) ** (m - 1) * (1 - (m + 1) * p) if m >= 1 else p
            if abs(direct - closed) > 1e-12:
                failures.append(f"marginal-gain formula off at m={m}, p={p}")
    return failures


def _cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    failures = _verify_solver(rng, args.instances) + _verify_invariants(rng)
    if failures:
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return 2
    print(f"verify: all checks passed ({args.instances} solver instances)")
    return 0


def _cmd_sweep(args) -> int:
    spec = harness.load_spec(args.spec)
    base = spec.instance
    rows = []
    for p in args.p or [base.p]:
        for M in args.M or [base.M]:
            try:
                config = InstanceConfig(base.K, M, p, base.T, base.mu)
            except ValueError as exc:
                print(f"skip p={p} M={M}: {exc}", file=sys.stderr)
                continue
            cell = dataclasses.replace(spec, instance=config)
            trace = harness.run_experiment(cell, jobs=args.jobs)
            for label, pt in trace.policies.items():
                rows.append((p, M, label, float(pt.mean[-1])))
    out = Path(args.out) if args.out else None
    lines = ["p,M,policy,final_mean_regret"]
    lines += [f"{p},{M},{label},{r!r}" for p, M, label, r in rows]
    text = "\n".join(lines) + "\n"
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {len(rows)} cells to {out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ammab",
        description="Asynchronous multiplayer bandits: simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment spec")
    run.add_argument("spec", help="TOML experiment file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--reps", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--stride", type=int, default=None)
    run.add_argument("--policy", action="append", default=None,
                     help="restrict to a named policy (repeatable)")
    run.add_argument("--jobs", type=int, default=1)
    run.set_defaults(func=_cmd_run)

    an = sub.add_parser("analyze", help="print instance diagnostics as JSON")
    an.add_argument("spec", help="TOML experiment file")
    an.add_argument("--tolerance", type=float, default=1e-6)
    an.add_argument("--r-range", choices=["full", "positive"], default="full",
                    help="zero-arm budgets considered when minimizing r: "
                         "'full' uses 0..nu_star, 'positive' uses 1..nu_star")
    an.set_defaults(func=_cmd_analyze)

    ver = sub.add_parser("verify", help="run solver/invariant self-checks")
    ver.add_argument("--instances", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=None)
    ver.set_defaults(func=_cmd_verify)

    sw = sub.add_parser("sweep", help="grid over p and M")
    sw.add_argument("spec", help="TOML experiment file")
    sw.add_argument("--p", type=float, action="append", default=None)
    sw.add_argument("--M", type=int, action="append", default=None)
    sw.add_argument("--out", default=None, help="CSV output path (default stdout)")
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, InfeasibleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
