"""Seeded replication runner and regret aggregation.

Runs a policy against the simulator for T rounds, accumulating the expected
per-round regret against the precomputed optimal assignment, replicates
with seeds base_seed + i, and aggregates mean and 10/90 percentile curves.
"""

from __future__ import annotations

import json
import math
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import environment
from .model import Assignment, InstanceConfig, Unconstrained
from .policies import make_policy
from .solver import SolveRequest, brute_force, solve_sequential, value_of, BRUTE_FORCE_GUARD, _count_compositions
from .model import cap

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class PolicySpec:
    name: str
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.params:
            suffix = "-".join(f"{k}{v}" for k, v in sorted(self.params.items()))
            return f"{self.name}-{suffix}"
        return self.name


@dataclass(frozen=True)
class ExperimentSpec:
    instance: InstanceConfig
    policies: tuple[PolicySpec, ...]
    replications: int = 50
    base_seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass(frozen=True)
class PolicyTrace:
    """Aggregated cumulative regret curves for one policy."""

    policy: str
    rounds: np.ndarray
    mean: np.ndarray
    p10: np.ndarray
    p90: np.ndarray
    final_per_replication: np.ndarray


@dataclass(frozen=True)
class RegretTrace:
    spec: ExperimentSpec
    policies: dict[str, PolicyTrace]


def load_spec(path: str | Path) -> ExperimentSpec:
    """Parse a TOML experiment description."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    inst = doc["instance"]
    config = InstanceConfig(
        K=int(inst["K"]),
        M=int(inst["M"]),
        p=float(inst["p"]),
        T=int(inst["T"]),
        mu=tuple(float(x) for x in inst["mu"]),
    )
    policies = tuple(
        PolicySpec(p.pop("name"), dict(p)) for p in [dict(x) for x in doc.get("policy", [])]
    )
    exp = doc.get("experiment", {})
    return ExperimentSpec(
        instance=config,
        policies=policies,
        replications=int(exp.get("replications", 50)),
        base_seed=int(exp.get("base_seed", 0)),
        record_stride=int(exp.get("record_stride", 1)),
    )


def optimal_for(config: InstanceConfig) -> Assignment:
    """The true optimal assignment, brute-forced when tractable.

    The sequential greedy result is cross-checked against the brute force
    whenever the enumeration is affordable.
    """
    req = SolveRequest(config.mu, config.M, config.p, Unconstrained())
    greedy = solve_sequential(req)
    if _count_compositions(config.M, config.K, cap(config.p)) <= BRUTE_FORCE_GUARD:
        exact = brute_force(req)
        gv = value_of(config.mu, greedy, config.p)
        ev = value_of(config.mu, exact, config.p)
        if gv != ev:
            raise RuntimeError(
                f"greedy/brute-force optimal value mismatch: {gv} vs {ev}"
            )
    return greedy


def run_replication(
    config: InstanceConfig,
    policy_spec: PolicySpec,
    seed: int,
    record_stride: int = 1,
    optimal: Assignment | None = None,
) -> np.ndarray:
    """Simulate one seeded run; returns the logged cumulative regret series."""
    if optimal is None:
        optimal = optimal_for(config)
    v_star = value_of(config.mu, optimal, config.p)
    rng = np.random.default_rng(seed)
    policy = make_policy(policy_spec.name, config, **policy_spec.params)
    mu = config.mu_array
    logged = np.empty(config.T // record_stride + (config.T % record_stride != 0), dtype=float)
    cum = 0.0
    j = 0
    for t in range(1, config.T + 1):
        played = policy.choose(t)
        outcome = environment.step(played, mu, config.p, rng)
        policy.observe(outcome, t)
        cum += v_star - value_of(config.mu, played, config.p)
        if t % record_stride == 0 or t == config.T:
            if j < len(logged):
                logged[j] = cum
                j += 1
    return logged[:j]


def _replication_task(args):
    config, policy_spec, seed, stride, optimal = args
    return run_replication(config, policy_spec, seed, stride, optimal)


def nearest_rank_percentile(values: np.ndarray, q: float) -> np.ndarray:
    """Nearest-rank percentile along axis 0 (q in (0, 100])."""
    ordered = np.sort(values, axis=0)
    n = values.shape[0]
    idx = max(math.ceil(q / 100.0 * n), 1) - 1
    return ordered[idx]


def _logged_rounds(T: int, stride: int) -> np.ndarray:
    rounds = list(range(stride, T + 1, stride))
    if not rounds or rounds[-1] != T:
        rounds.append(T)
    return np.array(rounds, dtype=np.int64)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> RegretTrace:
    """Run every policy for `replications` seeded runs and aggregate curves."""
    config = spec.instance
    optimal = optimal_for(config)
    rounds = _logged_rounds(config.T, spec.record_stride)
    traces: dict[str, PolicyTrace] = {}
    for pol in spec.policies:
        tasks = [
            (config, pol, spec.base_seed + i, spec.record_stride, optimal)
            for i in range(spec.replications)
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                series = list(pool.map(_replication_task, tasks))
        else:
            series = [_replication_task(t) for t in tasks]
        stacked = np.vstack(series)
        traces[pol.label] = PolicyTrace(
            policy=pol.label,
            rounds=rounds,
            mean=stacked.mean(axis=0),
            p10=nearest_rank_percentile(stacked, 10.0),
            p90=nearest_rank_percentile(stacked, 90.0),
            final_per_replication=stacked[:, -1].copy(),
        )
    return RegretTrace(spec=spec, policies=traces)


def write_csv(trace: RegretTrace, out_dir: str | Path) -> list[Path]:
    """One CSV per policy: t, mean_regret, p10, p90."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for label, pt in trace.policies.items():
        path = out_dir / f"regret_{label}.csv"
        with open(path, "w") as fh:
            fh.write("t,mean_regret,p10,p90\n")
            for t, m, lo, hi in zip(pt.rounds, pt.mean, pt.p10, pt.p90):
                fh.write(f"{int(t)},{float(m)!r},{float(lo)!r},{float(hi)!r}\n")
        paths.append(path)
    return paths


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10,
        )
        return out.stdout.strip() or "unknown"
    except OSError:
        return "unknown"


def write_manifest(trace: RegretTrace, out_dir: str | Path, wall_time: float) -> Path:
    spec = trace.spec
    manifest = {
        "instance": {
            "K": spec.instance.K,
            "M": spec.instance.M,
            "p": spec.instance.p,
            "T": spec.instance.T,
            "mu": list(spec.instance.mu),
        },
        "policies": [
            {"name": p.name, **p.params} for p in spec.policies
        ],
        "replications": spec.replications,
        "base_seed": spec.base_seed,
        "record_stride": spec.record_stride,
        "seeds": list(range(spec.base_seed, spec.base_seed + spec.replications)),
        "git": _git_describe(),
        "wall_time_s": wall_time,
        "python": sys.version.split()[0],
    }
    path = Path(out_dir) / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def run_and_save(spec: ExperimentSpec, out_dir: str | Path, jobs: int = 1) -> RegretTrace:
    start = time.time()
    trace = run_experiment(spec, jobs=jobs)
    write_csv(trace, out_dir)
    write_manifest(trace, out_dir, wall_time=time.time() - start)
    return trace
