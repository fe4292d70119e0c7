import dataclasses
import json
import math

import numpy as np
import pytest

from ammab import Assignment, InstanceConfig
from ammab.harness import (
    ExperimentSpec,
    PolicySpec,
    load_spec,
    nearest_rank_percentile,
    optimal_for,
    run_and_save,
    run_experiment,
    run_replication,
    write_csv,
)
from ammab import cli
from ammab import policies


SPEC_TEXT = """
[instance]
K = 2
M = 3
p = 0.1
T = 200
mu = [0.99, 0.01]

[experiment]
replications = 4
base_seed = 7
record_stride = 10

[[policy]]
name = "ucb"

[[policy]]
name = "etc"
explore_rounds = 20
"""


@pytest.fixture()
def small_spec(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(SPEC_TEXT)
    return load_spec(path)


def test_load_spec_round_trip(small_spec):
    assert small_spec.instance == InstanceConfig(2, 3, 0.1, 200, (0.99, 0.01))
    assert small_spec.replications == 4
    assert small_spec.base_seed == 7
    assert small_spec.record_stride == 10
    assert small_spec.policies == (
        PolicySpec("ucb", {}),
        PolicySpec("etc", {"explore_rounds": 20}),
    )


def test_experiment_spec_validation():
    inst = InstanceConfig(2, 3, 0.1, 100, (0.5, 0.5))
    with pytest.raises(ValueError):
        ExperimentSpec(inst, (), replications=0)
    with pytest.raises(ValueError):
        ExperimentSpec(inst, (), record_stride=0)


def test_optimal_for(left_instance, right_instance):
    assert optimal_for(left_instance) == Assignment((26, 4))
    assert optimal_for(right_instance) == Assignment((3, 0))


class _OraclePolicy:
    """Plays the precomputed optimal assignment every round."""

    def __init__(self, config):
        self.play = optimal_for(config)

    def choose(self, t):
        return self.play

    def observe(self, outcome, t):
        pass


def test_oracle_policy_zero_regret(right_instance, monkeypatch):
    monkeypatch.setitem(policies.POLICIES, "oracle", _OraclePolicy)
    cfg = dataclasses.replace(right_instance, T=50)
    series = run_replication(cfg, PolicySpec("oracle"), seed=0)
    assert series[-1] == 0.0


def test_single_round_replication(right_instance):
    cfg = dataclasses.replace(right_instance, T=1)
    series = run_replication(cfg, PolicySpec("ucb"), seed=3)
    assert len(series) == 1
    assert series[0] >= 0.0


def test_replication_deterministic_and_monotone(small_spec):
    cfg = small_spec.instance
    a = run_replication(cfg, PolicySpec("ucb"), seed=5, record_stride=10)
    b = run_replication(cfg, PolicySpec("ucb"), seed=5, record_stride=10)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a) >= -1e-12)
    assert np.all(a >= 0.0)


def test_nearest_rank_percentile():
    vals = np.arange(1, 11, dtype=float).reshape(10, 1)
    assert nearest_rank_percentile(vals, 10.0)[0] == 1.0
    assert nearest_rank_percentile(vals, 90.0)[0] == 9.0
    assert nearest_rank_percentile(vals, 100.0)[0] == 10.0


def test_run_experiment_aggregation(small_spec):
    trace = run_experiment(small_spec)
    for label in ("ucb", "etc-explore_rounds20"):
        pt = trace.policies[label]
        assert np.all(np.diff(pt.mean) >= -1e-12)
        assert np.all(pt.p10 <= pt.p90)
        assert len(pt.final_per_replication) == 4
        lo = pt.final_per_replication.min()
        hi = pt.final_per_replication.max()
        assert lo - 1e-12 <= pt.mean[-1] <= hi + 1e-12
        assert pt.rounds[-1] == small_spec.instance.T


def test_single_replication_degenerate_aggregation(small_spec):
    spec = dataclasses.replace(small_spec, replications=1)
    trace = run_experiment(spec)
    pt = trace.policies["ucb"]
    assert np.array_equal(pt.mean, pt.p10)
    assert np.array_equal(pt.mean, pt.p90)


def test_csv_output_deterministic(small_spec, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    write_csv(run_experiment(small_spec), out1)
    write_csv(run_experiment(small_spec), out2)
    for name in ("regret_ucb.csv", "regret_etc-explore_rounds20.csv"):
        b1 = (out1 / name).read_bytes()
        assert b1 == (out2 / name).read_bytes()
        header = b1.decode().splitlines()[0]
        assert header == "t,mean_regret,p10,p90"


def test_run_and_save_manifest(small_spec, tmp_path):
    out = tmp_path / "results"
    run_and_save(small_spec, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seeds"] == [7, 8, 9, 10]
    assert manifest["instance"]["mu"] == [0.99, 0.01]
    assert manifest["replications"] == 4
    assert "wall_time_s" in manifest


def test_parallel_matches_serial(small_spec):
    serial = run_experiment(small_spec, jobs=1)
    parallel = run_experiment(small_spec, jobs=2)
    for label in serial.policies:
        assert np.array_equal(serial.policies[label].mean, parallel.policies[label].mean)


def test_cli_run(tmp_path, capsys):
    spec_path = tmp_path / "spec.toml"
    spec_path.write_text(SPEC_TEXT)
    out = tmp_path / "results"
    rc = cli.main(["run", str(spec_path), "--out", str(out), "--reps", "2"])
    assert rc == 0
    assert (out / "regret_ucb.csv").exists()
    assert (out / "manifest.json").exists()


def test_cli_run_policy_filter(tmp_path):
    spec_path = tmp_path / "spec.toml"
    spec_path.write_text(SPEC_TEXT)
    out = tmp_path / "results"
    rc = cli.main(["run", str(spec_path), "--out", str(out), "--reps", "2",
                   "--policy", "ucb"])
    assert rc == 0
    assert (out / "regret_ucb.csv").exists()
    assert not (out / "regret_etc-explore_rounds20.csv").exists()


def test_cli_analyze_right_instance(capsys):
    rc = cli.main(["analyze", "configs/fig1_right.toml"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["nu_star"] == 1
    assert doc["gaps"] == [0.98]
    assert math.isclose(doc["delta_super"], 0.06137, abs_tol=1e-12)


def test_cli_analyze_left_instance(capsys):
    rc = cli.main(["analyze", "configs/fig1_left.toml"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["nu_star"] == 0
    assert doc["delta_super"] == "inf"


def test_cli_verify(capsys):
    assert cli.main(["verify", "--instances", "50"]) == 0


def test_cli_sweep(tmp_path):
    spec_path = tmp_path / "spec.toml"
    spec_path.write_text(SPEC_TEXT)
    out = tmp_path / "sweep.csv"
    rc = cli.main(["sweep", str(spec_path), "--p", "0.1",
                   "--M", "3", "--M", "4", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,M,policy,final_mean_regret"
    assert len(lines) == 1 + 2 * 2  # two M values, two policies


def test_cli_bad_spec_exit_code(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[instance]\nK = 2\nM = 1\np = 0.1\nT = 10\nmu = [0.5, 0.5]\n")
    assert cli.main(["analyze", str(bad)]) == 1


def test_cli_analyze_r_range_flag(capsys):
    rc = cli.main(["analyze", "configs/fig1_right.toml", "--r-range", "positive"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["r"] > 0
    # the dense instance has nu_star = 0, so the restricted range is empty
    assert cli.main(["analyze", "configs/fig1_left.toml", "--r-range", "positive"]) == 1
