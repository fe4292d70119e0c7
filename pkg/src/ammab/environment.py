"""Stochastic round simulator.

Each round, every assigned player is active independently with probability p.
An arm pays out only when exactly one of its players is active; the central
entity observes the single-occupancy indicators and the rewards of the
single-active arms. Rewards are Bernoulli(mu_k).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Assignment


@dataclass(frozen=True)
class RoundOutcome:
    """Observations from one simulated round.

    eta[k] is 1 iff exactly one player was active on arm k; rewards[k] is the
    sampled reward when eta[k] = 1 and 0 otherwise. active_counts is kept as
    a diagnostic and is not consumed by any policy.
    """

    eta: np.ndarray
    rewards: np.ndarray
    active_counts: np.ndarray


def step(assignment: Assignment, mu, p: float, rng: np.random.Generator) -> RoundOutcome:
    """Sample activations, collisions and rewards for one round.

    Players are exchangeable, so per-arm activation counts are drawn as
    Binomial(M_k, p). Draws consume the stream in fixed arm order: one
    binomial vector, then one uniform vector for rewards (rewards are used
    only where a single player was active, but drawn unconditionally so the
    stream position does not depend on outcomes).
    """
    counts = np.asarray(assignment.counts, dtype=np.int64)
    mu = np.asarray(mu, dtype=float)
    active = rng.binomial(counts, p)
    eta = (active == 1).astype(np.int64)
    rewards = ((rng.random(len(counts)) < mu) & (eta == 1)).astype(np.int64)
    return RoundOutcome(eta=eta, rewards=rewards, active_counts=active)
