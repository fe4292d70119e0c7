"""Core problem types and exact expected-value arithmetic.

An instance has K arms with mean rewards mu, M players, a common activation
probability p and a horizon T. An assignment puts M_k players on arm k; a
round yields reward mu_k * g(M_k) in expectation, where g(m) is the
probability that exactly one of m players is active.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def cap(p: float) -> int:
    """Maximum number of players assignable to a single arm: floor(-1/ln(1-p))."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    return math.floor(-1.0 / math.log1p(-p))


def g(m: int, p: float) -> float:
    """Probability that exactly one of m players (each active w.p. p) is active."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m == 0:
        return 0.0
    return m * p * (1.0 - p) ** (m - 1)


def g_table(p: float, max_m: int | None = None) -> np.ndarray:
    """Vector of g(m, p) for m = 0..max_m (default max_m = cap(p))."""
    if max_m is None:
        max_m = cap(p)
    m = np.arange(max_m + 1)
    out = m * p * (1.0 - p) ** (m - 1.0)
    out[0] = 0.0
    return out


@dataclass(frozen=True)
class Assignment:
    """Player counts per arm, summing to the player budget."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError(f"negative player count in {self.counts}")

    @property
    def K(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.counts) if c > 0)

    def validate(self, M: int, p: float) -> None:
        """Check the budget and per-arm cap constraints."""
        if self.total != M:
            raise ValueError(f"counts {self.counts} sum to {self.total}, expected {M}")
        c = cap(p)
        if any(ck > c for ck in self.counts):
            raise ValueError(f"counts {self.counts} exceed per-arm cap {c}")


@dataclass(frozen=True)
class InstanceConfig:
    """A full problem instance: arm means, player budget, activation rate, horizon."""

    K: int
    M: int
    p: float
    T: int
    mu: tuple[float, ...]

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if len(self.mu) != self.K:
            raise ValueError(f"mu has length {len(self.mu)}, expected K={self.K}")
        if any(not 0.0 <= m <= 1.0 for m in self.mu):
            raise ValueError(f"arm means must lie in [0, 1], got {self.mu}")
        if self.M < self.K:
            raise ValueError(f"need M >= K, got M={self.M}, K={self.K}")
        if self.M > self.K * cap(self.p):
            raise ValueError(
                f"infeasible budget: M={self.M} exceeds K*cap = {self.K * cap(self.p)}"
            )

    @property
    def mu_array(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=float)


# Constraint kinds for the assignment optimization.


@dataclass(frozen=True)
class Unconstrained:
    pass


@dataclass(frozen=True)
class ForcedSupport:
    """Every arm in `arms` must receive at least one player."""

    arms: frozenset[int] = field(default_factory=frozenset)


@dataclass(frozen=True)
class MaxZeroArms:
    """At most `nu` arms may receive zero players (support size >= K - nu)."""

    nu: int = 0

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")


ConstraintSpec = Unconstrained | ForcedSupport | MaxZeroArms


def expected_value(mu: Sequence[float], assignment: Assignment, p: float) -> float:
    """Expected per-round reward <mu, g(counts)>."""
    if len(mu) != assignment.K:
        raise ValueError(
            f"dimension mismatch: {len(mu)} means vs {assignment.K} arms"
        )
    return sum(m * g(c, p) for m, c in zip(mu, assignment.counts))


def per_round_regret(
    mu: Sequence[float], optimal: Assignment, played: Assignment, p: float
) -> float:
    """Expected one-round regret <mu, g(optimal) - g(played)>."""
    if optimal.K != played.K:
        raise ValueError(
            f"dimension mismatch: {optimal.K} vs {played.K} arms"
        )
    return expected_value(mu, optimal, p) - expected_value(mu, played, p)
