"""Assignment optimization: maximize <v, g(M)> over valid assignments.

The workhorse is a sequential greedy that adds players one at a time to the
arm with the best marginal gain. It is exactly optimal for the unconstrained
set and for forced-support constraints (seed one player per forced arm,
then run the greedy). Support-size constraints are handled by enumerating
candidate supports. `brute_force` enumerates every feasible assignment and
serves as the verification oracle for all of the above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .model import (
    Assignment,
    ConstraintSpec,
    ForcedSupport,
    MaxZeroArms,
    Unconstrained,
    cap,
    g,
)

BRUTE_FORCE_GUARD = 10**7


class InfeasibleError(ValueError):
    """The constraint set contains no valid assignment."""


@dataclass(frozen=True)
class SolveRequest:
    values: tuple[float, ...]
    M: int
    p: float
    constraint: ConstraintSpec = field(default_factory=Unconstrained)

    @property
    def K(self) -> int:
        return len(self.values)


def _check_budget(K: int, M: int, p: float) -> int:
    c = cap(p)
    if M > K * c:
        raise InfeasibleError(f"budget M={M} exceeds total capacity {K * c}")
    if M < 0:
        raise InfeasibleError(f"negative budget M={M}")
    return c


@lru_cache(maxsize=64)
def _marginal_gains(p: float, c: int) -> tuple[float, ...]:
    return tuple(g(m + 1, p) - g(m, p) for m in range(c))


def _greedy_fill(values, counts, budget, p, c):
    """Assign `budget` players greedily by marginal gain, lowest index on ties."""
    marg = _marginal_gains(p, c)
    for _ in range(budget):
        best_k = -1
        best_gain = -math.inf
        for k, v in enumerate(values):
            if counts[k] >= c:
                continue
            gain = v * marg[counts[k]]
            if gain > best_gain:
                best_gain = gain
                best_k = k
        if best_k < 0:
            raise InfeasibleError("all arms at capacity with players left to place")
        counts[best_k] += 1
    return counts


def solve_sequential(req: SolveRequest) -> Assignment:
    """Greedy argmax of <v, g(M)> over the unconstrained assignment set."""
    if not isinstance(req.constraint, Unconstrained):
        raise ValueError("solve_sequential only handles the unconstrained set")
    c = _check_budget(req.K, req.M, req.p)
    counts = _greedy_fill(req.values, [0] * req.K, req.M, req.p, c)
    return Assignment(tuple(counts))


def solve_forced_support(req: SolveRequest) -> Assignment:
    """Argmax over assignments putting at least one player on each forced arm."""
    if not isinstance(req.constraint, ForcedSupport):
        raise ValueError("expected a ForcedSupport constraint")
    forced = sorted(req.constraint.arms)
    if any(k < 0 or k >= req.K for k in forced):
        raise ValueError(f"forced arms {forced} out of range for K={req.K}")
    if len(forced) > req.M:
        raise InfeasibleError(
            f"cannot force {len(forced)} arms with only M={req.M} players"
        )
    c = _check_budget(req.K, req.M, req.p)
    counts = [0] * req.K
    for k in forced:
        counts[k] = 1
    counts = _greedy_fill(req.values, counts, req.M - len(forced), req.p, c)
    return Assignment(tuple(counts))


def solve_max_zero_arms(req: SolveRequest) -> Assignment:
    """Argmax over assignments with at most nu arms left empty.

    Enumerates the candidate sets of empty arms (lexicographically, so ties
    resolve to the smallest zero-set) and solves a forced-support problem
    for each complement.
    """
    if not isinstance(req.constraint, MaxZeroArms):
        raise ValueError("expected a MaxZeroArms constraint")
    nu = min(req.constraint.nu, req.K)
    if req.K - nu > req.M:
        raise InfeasibleError(
            f"cannot support {req.K - nu} arms with only M={req.M} players"
        )
    best: Assignment | None = None
    best_value = -math.inf
    for zero_set in combinations(range(req.K), nu):
        support = frozenset(range(req.K)) - frozenset(zero_set)
        sub = SolveRequest(req.values, req.M, req.p, ForcedSupport(support))
        cand = solve_forced_support(sub)
        value = sum(v * g(m, req.p) for v, m in zip(req.values, cand.counts))
        if value > best_value:
            best_value = value
            best = cand
    assert best is not None
    return best


def solve(req: SolveRequest) -> Assignment:
    """Dispatch on the constraint kind."""
    if isinstance(req.constraint, Unconstrained):
        return solve_sequential(req)
    if isinstance(req.constraint, ForcedSupport):
        return solve_forced_support(req)
    return solve_max_zero_arms(req)


def _compositions(total: int, parts: int, c: int) -> Iterator[tuple[int, ...]]:
    """All ways to write `total` as `parts` ordered nonnegative ints, each <= c."""
    if parts == 1:
        if 0 <= total <= c:
            yield (total,)
        return
    for first in range(min(total, c) + 1):
        for rest in _compositions(total - first, parts - 1, c):
            yield (first,) + rest


def _count_compositions(total: int, parts: int, c: int) -> int:
    row = [1 if 0 <= t <= c else 0 for t in range(total + 1)]
    for _ in range(parts - 1):
        prefix = [0]
        for x in row:
            prefix.append(prefix[-1] + x)
        row = [
            prefix[t + 1] - (prefix[t - c] if t - c >= 0 else 0)
            for t in range(total + 1)
        ]
    return row[total]


def _satisfies(counts: tuple[int, ...], constraint: ConstraintSpec, K: int) -> bool:
    if isinstance(constraint, Unconstrained):
        return True
    if isinstance(constraint, ForcedSupport):
        return all(counts[k] >= 1 for k in constraint.arms)
    zero = sum(1 for ck in counts if ck == 0)
    return zero <= constraint.nu


def brute_force(req: SolveRequest) -> Assignment:
    """Exhaustive argmax of <v, g(M)>; lexicographically smallest maximizer."""
    c = _check_budget(req.K, req.M, req.p)
    n = _count_compositions(req.M, req.K, c)
    if n > BRUTE_FORCE_GUARD:
        raise ValueError(f"enumeration size {n} exceeds guard {BRUTE_FORCE_GUARD}")
    gtab = [g(m, req.p) for m in range(c + 1)]
    best: tuple[int, ...] | None = None
    best_value = -math.inf
    for counts in _compositions(req.M, req.K, c):
        if not _satisfies(counts, req.constraint, req.K):
            continue
        value = sum(v * gtab[m] for v, m in zip(req.values, counts))
        if value > best_value:
            best_value = value
            best = counts
    if best is None:
        raise InfeasibleError("no feasible assignment under the given constraint")
    return Assignment(best)


def value_of(values: Sequence[float], assignment: Assignment, p: float) -> float:
    """Objective <v, g(counts)> of an assignment."""
    return sum(v * g(m, p) for v, m in zip(values, assignment.counts))
