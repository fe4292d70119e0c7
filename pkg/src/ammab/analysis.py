"""Instance diagnostics for a known mean vector.

Computes the quantities that drive problem difficulty: nu_star (how many
arms the optimal assignment empties), the mean gaps to the worst surviving
arm, the value gap of emptying one arm fewer, and r, the smallest sup-norm
perturbation of the means that changes a constrained optimal assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Assignment, InstanceConfig, MaxZeroArms, Unconstrained, g
from .solver import SolveRequest, brute_force, value_of, _compositions, _count_compositions, BRUTE_FORCE_GUARD
from .model import cap


@dataclass(frozen=True)
class RWitness:
    """The minimizing perturbation found by compute_r."""

    r: float
    nu: int
    alternative: Assignment
    baseline: Assignment
    signs: tuple[float, ...]


@dataclass(frozen=True)
class InstanceDiagnostics:
    nu_star: int
    gaps: tuple[float, ...]
    delta_super: float
    r: float
    elimination_condition: bool


def optimal_assignment(config: InstanceConfig, nu: int | None = None) -> Assignment:
    """Brute-force argmax on the true means, optionally with a zero-arm budget."""
    constraint = Unconstrained() if nu is None else MaxZeroArms(nu)
    req = SolveRequest(config.mu, config.M, config.p, constraint)
    return brute_force(req)


def compute_nu_star(config: InstanceConfig) -> int:
    """Number of arms assigned zero players by the optimal assignment."""
    star = optimal_assignment(config)
    return sum(1 for c in star.counts if c == 0)


def _sorted_means(config: InstanceConfig) -> np.ndarray:
    # stable sort so duplicated means resolve by arm index
    return np.asarray(config.mu)[np.argsort(config.mu, kind="stable")]


def compute_gaps(config: InstanceConfig, nu_star: int) -> tuple[tuple[float, ...], float]:
    """Mean gaps to the worst surviving arm, and the one-fewer-removal value gap.

    gaps[j-1] = mu_(nu*+1) - mu_(j) for j = 1..nu*. The second return is
    <mu, g(M*) - g(M*_{nu*-1})>, infinite when nu* = 0.
    """
    if nu_star == 0:
        return (), math.inf
    sorted_mu = _sorted_means(config)
    threshold = sorted_mu[nu_star]
    gaps = tuple(float(threshold - sorted_mu[j]) for j in range(nu_star))
    star = optimal_assignment(config)
    runner_up = optimal_assignment(config, nu=nu_star - 1)
    delta_super = value_of(config.mu, star, config.p) - value_of(
        config.mu, runner_up, config.p
    )
    return gaps, float(delta_super)


def _feasible_assignments(config: InstanceConfig, nu: int):
    c = cap(config.p)
    if _count_compositions(config.M, config.K, c) > BRUTE_FORCE_GUARD:
        raise ValueError("instance too large for exhaustive perturbation analysis")
    for counts in _compositions(config.M, config.K, c):
        if sum(1 for ck in counts if ck == 0) <= nu:
            yield Assignment(counts)


def _flip_epsilon(mu, d, tolerance: float) -> tuple[float, np.ndarray] | None:
    """Smallest eps such that perturbing mu by eps in the directions sign(d),
    clipped to [0, 1], makes <mu + delta, d> >= 0. None if impossible."""
    gap = -float(np.dot(mu, d))
    if gap <= 0.0:
        return 0.0, np.sign(d)
    if not np.any(d > 0) and not np.any((d < 0) & (mu > 0)):
        return None
    s = np.sign(d)
    l1 = float(np.abs(d).sum())
    eps = gap / l1
    if np.all((mu + eps * s >= 0.0) & (mu + eps * s <= 1.0)):
        return eps, s

    def attained(e: float) -> float:
        return float(np.dot(np.clip(mu + e * s, 0.0, 1.0), d))

    if attained(1.0) < 0.0:
        return None
    lo, hi = eps, 1.0
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if attained(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi, s


def compute_r_detailed(
    config: InstanceConfig,
    tolerance: float = 1e-6,
    nu_range: tuple[int, ...] | None = None,
) -> RWitness:
    """Minimum sup-norm perturbation of mu changing some constrained argmax.

    For each nu in nu_range (default 0..nu_star) and each feasible
    alternative to the constrained optimum, finds the smallest sup-norm
    shift of mu under which the alternative ties or beats the optimum, and
    returns the overall minimizer. r = 0 when an optimum is not unique.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    mu = config.mu_array
    if nu_range is None:
        nu_range = tuple(range(compute_nu_star(config) + 1))
    gtab = np.array([g(m, config.p) for m in range(cap(config.p) + 2)])
    best: RWitness | None = None
    for nu in nu_range:
        star = optimal_assignment(config, nu=nu)
        g_star = gtab[list(star.counts)]
        star_value = float(np.dot(mu, g_star))
        for alt in _feasible_assignments(config, nu):
            if alt == star:
                continue
            d = gtab[list(alt.counts)] - g_star
            alt_value = float(np.dot(mu, gtab[list(alt.counts)]))
            if alt_value == star_value:
                return RWitness(0.0, nu, alt, star, tuple(np.sign(d)))
            res = _flip_epsilon(mu, d, tolerance)
            if res is None:
                continue
            eps, s = res
            if best is None or eps < best.r:
                best = RWitness(float(eps), nu, alt, star, tuple(s))
    if best is None:
        raise ValueError("no alternative assignment exists; r is undefined")
    return best


def compute_r(
    config: InstanceConfig,
    tolerance: float = 1e-6,
    nu_range: tuple[int, ...] | None = None,
) -> float:
    return compute_r_detailed(config, tolerance, nu_range).r


def check_elimination_condition(config: InstanceConfig) -> bool:
    """Sufficient condition on mean dispersion for nu_star = 0."""
    alpha = config.M * config.p / config.K
    if config.p > 0.1 or not (2 * config.p < alpha < 1.0):
        return False
    ratio = min(config.mu) / max(config.mu)
    return ratio >= 1.3 * math.exp(-alpha) * (1.0 - alpha)


def check_third_term_inequality(config: InstanceConfig) -> bool:
    """Value gap of one-fewer-removal dominates the marginal-gain-scaled mean gap.

    Requires nu_star >= 1; always true, exercised as a fuzzed property.
    """
    nu_star = compute_nu_star(config)
    if nu_star == 0:
        raise ValueError("inequality is vacuous when nu_star = 0")
    _, delta_super = compute_gaps(config, nu_star)
    sorted_mu = _sorted_means(config)
    delta_last = float(sorted_mu[nu_star] - sorted_mu[nu_star - 1])
    order = np.argsort(config.mu, kind="stable")
    star = optimal_assignment(config)
    m_surv = star.counts[order[nu_star]]
    rhs = (g(m_surv + 1, config.p) - g(m_surv, config.p)) * delta_last
    return delta_super >= rhs


def diagnose(config: InstanceConfig, tolerance: float = 1e-6) -> InstanceDiagnostics:
    nu_star = compute_nu_star(config)
    gaps, delta_super = compute_gaps(config, nu_star)
    return InstanceDiagnostics(
        nu_star=nu_star,
        gaps=gaps,
        delta_super=delta_super,
        r=compute_r(config, tolerance),
        elimination_condition=check_elimination_condition(config),
    )
