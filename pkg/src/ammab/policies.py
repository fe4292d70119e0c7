"""Online assignment policies: Cautious Greedy, centralized UCB, and a
simplified explore-then-commit baseline.

All policies share the same interface: `choose(t)` returns the assignment to
play at round t and `observe(outcome, t)` feeds back the round's
observations. A policy instance is single-threaded; choose/observe must
alternate strictly.
"""

from __future__ import annotations

import math

import numpy as np

from .environment import RoundOutcome
from .model import Assignment, ForcedSupport, InstanceConfig, MaxZeroArms, Unconstrained
from .solver import (
    SolveRequest,
    solve_forced_support,
    solve_max_zero_arms,
    solve_sequential,
    value_of,
)


class ArmStatistics:
    """Per-arm observation counts, empirical means and Hoeffding bounds.

    The radius is sqrt(log(2 T^2 K^2) / (2 T_k)); arms never observed get
    the optimistic convention mu_hat = 1 with bounds clipped to [0, 1].
    """

    def __init__(self, K: int, T: int):
        self.K = K
        self.log_term = math.log(2.0 * T * T * K * K)
        self.t_k = np.zeros(K, dtype=np.int64)
        self.reward_sum = np.zeros(K, dtype=float)

    def update(self, outcome: RoundOutcome) -> None:
        self.t_k += outcome.eta
        self.reward_sum += outcome.rewards

    @property
    def mu_hat(self) -> np.ndarray:
        out = np.ones(self.K)
        seen = self.t_k > 0
        out[seen] = self.reward_sum[seen] / self.t_k[seen]
        return out

    @property
    def zeta(self) -> np.ndarray:
        out = np.full(self.K, np.inf)
        seen = self.t_k > 0
        out[seen] = np.sqrt(self.log_term / (2.0 * self.t_k[seen]))
        return out

    @property
    def mu_low(self) -> np.ndarray:
        return np.maximum(self.mu_hat - self.zeta, 0.0)

    @property
    def mu_high(self) -> np.ndarray:
        return np.minimum(self.mu_hat + self.zeta, 1.0)


def round_robin_step(pressure: list[int], Y: list[int], rr_t: int) -> tuple[list[int], int]:
    """One rotation of the under-pressure list over the candidate list Y.

    Drops the head of `pressure`, shifts, and appends the rr_t-th element of
    Y (1-based, wrapping). Over |Y| consecutive iterations every element of
    Y is added and dropped exactly once.
    """
    if pressure and not Y:
        raise ValueError("cannot rotate a nonempty pressure list over empty Y")
    if not pressure:
        return [], rr_t + 1
    rotated = pressure[1:] + [Y[(rr_t - 1) % len(Y)]]
    return rotated, rr_t + 1


class CautiousGreedy:
    """Greedy on empirical means, but cautious about emptying arms.

    Keeps every active arm regularly played via a rotating under-pressure
    set, and only lets nu (a lower confidence estimate of the number of
    arms worth emptying) grow when emptying more arms is provably better.
    Arms are removed for good once their upper bound falls below the
    (nu+1)-th lower bound.
    """

    name = "cautious-greedy"

    def __init__(self, config: InstanceConfig):
        self.config = config
        self.stats = ArmStatistics(config.K, config.T)
        self.nu = 0
        self.active: set[int] = set(range(config.K))
        self.accepted: set[int] = set()
        self.pressure: list[int] = []
        self.rr_t = 1
        self.n = 0

    def choose(self, t: int) -> Assignment:
        forced = frozenset(self.active - set(self.pressure))
        values = self.stats.mu_hat
        # removed arms never attract players on merit; they can only soak up
        # budget overflow when the active arms' capacity is exhausted
        v = tuple(values[k] if k in self.active else 0.0 for k in range(self.config.K))
        req = SolveRequest(v, self.config.M, self.config.p, ForcedSupport(forced))
        return solve_forced_support(req)

    def observe(self, outcome: RoundOutcome, t: int) -> None:
        self.stats.update(outcome)
        Y = sorted(self.active - self.accepted)
        self.pressure, self.rr_t = round_robin_step(self.pressure, Y, self.rr_t)
        self.n += 1
        if self.n >= max(len(Y), 1):
            self._phase_update()

    def _phase_update(self) -> None:
        self.n = 0
        cfg = self.config
        low = self.stats.mu_low
        high = self.stats.mu_high
        low_req = SolveRequest(tuple(low), cfg.M, cfg.p, Unconstrained())
        guaranteed = value_of(low, solve_sequential(low_req), cfg.p)
        while self.nu < cfg.K:
            nu_req = SolveRequest(tuple(high), cfg.M, cfg.p, MaxZeroArms(self.nu))
            optimistic = value_of(high, solve_max_zero_arms(nu_req), cfg.p)
            if guaranteed > optimistic:
                self.nu += 1
            else:
                break
        # order statistics are over all K arms; nu = 0 accepts nothing
        if self.nu > 0:
            high_nu = np.sort(high)[self.nu - 1]
            newly_accepted = {k for k in range(cfg.K) if low[k] > high_nu}
        else:
            newly_accepted = set()
        low_nu1 = np.sort(low)[min(self.nu, cfg.K - 1)]
        self.active -= {k for k in self.active if high[k] < low_nu1}
        self.accepted = newly_accepted & self.active
        n_removed = cfg.K - len(self.active)
        n_pressure = max(0, self.nu - n_removed)
        candidates = sorted(self.active - self.accepted)
        self.pressure = candidates[: min(n_pressure, len(candidates))]
        self.rr_t = len(self.pressure) + 1


def ucb_choose(stats: ArmStatistics, M: int, p: float) -> Assignment:
    """Greedy assignment on the upper confidence bounds."""
    req = SolveRequest(tuple(stats.mu_high), M, p, Unconstrained())
    return solve_sequential(req)


class UCB:
    """Centralized UCB: play the greedy assignment on optimistic means."""

    name = "ucb"

    def __init__(self, config: InstanceConfig):
        self.config = config
        self.stats = ArmStatistics(config.K, config.T)

    def choose(self, t: int) -> Assignment:
        return ucb_choose(self.stats, self.config.M, self.config.p)

    def observe(self, outcome: RoundOutcome, t: int) -> None:
        self.stats.update(outcome)


class ExploreThenCommit:
    """Uniform exploration on all arms, then a one-shot commit.

    Plays the balanced forced-support assignment for `explore_rounds` rounds
    and afterwards commits permanently to the greedy assignment on the means
    estimated at commit time. Default exploration length is ceil(T^(2/3)).
    """

    name = "etc"

    def __init__(self, config: InstanceConfig, explore_rounds: int | None = None):
        if explore_rounds is None:
            explore_rounds = math.ceil(config.T ** (2.0 / 3.0))
        if not 1 <= explore_rounds <= config.T:
            raise ValueError(f"explore_rounds must be in [1, T], got {explore_rounds}")
        self.config = config
        self.explore_rounds = explore_rounds
        self.stats = ArmStatistics(config.K, config.T)
        ones = (1.0,) * config.K
        self._explore_play = solve_forced_support(
            SolveRequest(ones, config.M, config.p, ForcedSupport(frozenset(range(config.K))))
        )
        self._committed: Assignment | None = None

    def choose(self, t: int) -> Assignment:
        if t <= self.explore_rounds:
            return self._explore_play
        if self._committed is None:
            req = SolveRequest(
                tuple(self.stats.mu_hat), self.config.M, self.config.p, Unconstrained()
            )
            self._committed = solve_sequential(req)
        return self._committed

    def observe(self, outcome: RoundOutcome, t: int) -> None:
        if t <= self.explore_rounds:
            self.stats.update(outcome)


POLICIES = {
    "cautious-greedy": CautiousGreedy,
    "ucb": UCB,
    "etc": ExploreThenCommit,
}


def make_policy(name: str, config: InstanceConfig, **params):
    try:
        cls = POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}")
    return cls(config, **params)
