"""Centralized asynchronous multiplayer multi-armed bandits."""

from .model import (
    Assignment,
    ForcedSupport,
    InstanceConfig,
    MaxZeroArms,
    Unconstrained,
    cap,
    expected_value,
    g,
    per_round_regret,
)
from .solver import (
    SolveRequest,
    brute_force,
    solve,
    solve_forced_support,
    solve_max_zero_arms,
    solve_sequential,
)
from .environment import RoundOutcome, step
from .policies import ArmStatistics, CautiousGreedy, ExploreThenCommit, UCB, make_policy
from .analysis import (
    InstanceDiagnostics,
    check_elimination_condition,
    check_third_term_inequality,
    compute_gaps,
    compute_nu_star,
    compute_r,
    diagnose,
)
from .harness import ExperimentSpec, PolicySpec, load_spec, run_experiment, run_replication

__version__ = "0.1.0"
