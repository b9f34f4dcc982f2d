"""Closed-form regret bounds for corrupt bandits and identifiability checks.

All quantities are driven by the per-arm divergences

    D_a  = d(lambda_a, g_a(mu*))      (feedback-space gap to the optimum)
    D'_a = d'(lambda_a, g_a(mu*))     (derivative in the first argument)

where lambda_a = g_a(mu_a) is arm a's feedback mean and mu* the best reward
mean.  A suboptimal arm with D_a = 0 produces feedback indistinguishable from
the optimal arm's, so the logarithmic lower bound is genuinely infinite there;
that is reported as +inf rather than raised.  The finite-time upper bound, by
contrast, is only stated for identifiable models and raises.

Arms tied with the optimum (Delta_a = 0) contribute nothing to either bound
and are skipped, mirroring the sums over suboptimal arms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import CorruptBanditModel
from .klmath import kl_deriv, kl_div


class UnidentifiableModel(ValueError):
    """A suboptimal arm's feedback mean coincides with the optimal arm's image."""


@dataclass(frozen=True)
class BoundReport:
    """Per-arm log T coefficients, their sum, and any T-independent additive part."""

    per_arm_terms: np.ndarray
    total_coefficient: float
    constant_terms: float


def _divergences(model: CorruptBanditModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(gaps, D_a, D'_a) per arm, computed from scheme arithmetic.

    Works for non-invertible schemes too: g_a(mu*) only needs the forward map.
    D'_a is NaN where D_a is 0 or the image sits on the boundary, but those
    arms are never consumed (they are either the optimum or raise upstream).
    """
    mu_star = float(model.means.max())
    lambdas = model.feedback_means
    g_star = np.array(
        [min(1.0, max(0.0, (1.0 - s.p00) + s.slope * mu_star)) for s in model.schemes]
    )
    d = np.array([kl_div(lam, g) for lam, g in zip(lambdas, g_star)])
    dp = np.array(
        [
            kl_deriv(lam, g) if 0.0 < g < 1.0 else math.nan
            for lam, g in zip(lambdas, g_star)
        ]
    )
    return model.gaps(), d, dp


def lower_bound_terms(
    gaps: np.ndarray, lambdas: np.ndarray, g_at_optimum: np.ndarray
) -> np.ndarray:
    """Per-arm log T coefficients Delta_a / d(lambda_a, g_a(mu*)).

    Model-free core: tied arms (Delta_a = 0) give 0, a positive gap with zero
    divergence gives +inf.
    """
    gaps = np.asarray(gaps, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    g_at_optimum = np.asarray(g_at_optimum, dtype=np.float64)
    terms = np.zeros(gaps.size, dtype=np.float64)
    for a in range(gaps.size):
        if gaps[a] == 0.0:
            continue
        div = kl_div(lambdas[a], g_at_optimum[a])
        terms[a] = math.inf if div == 0.0 else gaps[a] / div
    return terms


def lower_bound_report(model: CorruptBanditModel) -> BoundReport:
    """Logarithmic lower bound decomposition for a corrupt bandit model."""
    mu_star = float(model.means.max())
    g_star = np.array(
        [min(1.0, max(0.0, (1.0 - s.p00) + s.slope * mu_star)) for s in model.schemes]
    )
    terms = lower_bound_terms(model.gaps(), model.feedback_means, g_star)
    return BoundReport(terms, float(terms.sum()), 0.0)


def lower_bound_curve(model: CorruptBanditModel, T: float) -> float:
    """log(T) times the summed lower-bound coefficients; +inf if any arm is
    unidentifiable."""
    if not T >= 2:
        raise ValueError(f"T must be >= 2, got {T!r}")
    return lower_bound_report(model).total_coefficient * math.log(T)


def finite_time_ub_report(model: CorruptBanditModel) -> BoundReport:
    """Leading coefficient and T-independent part of the finite-time bound."""
    gaps, d, dp = _divergences(model)
    terms = np.zeros(gaps.size, dtype=np.float64)
    constant = 0.0
    for a in range(gaps.size):
        if gaps[a] == 0.0:
            continue
        if d[a] == 0.0:
            raise UnidentifiableModel(
                f"arm {a} has zero feedback divergence from the optimal arm"
            )
        terms[a] = gaps[a] / d[a]
        constant += gaps[a] * (2.0 * (dp[a] / d[a]) ** 2 + 4.0)
    return BoundReport(terms, float(terms.sum()), float(constant))


def finite_time_ub_klucb(model: CorruptBanditModel, T: float) -> float:
    """Finite-time regret upper bound for the KL-index corruption-aware policy.

    Sum over suboptimal arms of

        Delta_a * [ log T / D_a
                    + sqrt(2 pi) sqrt(D'_a^2 / D_a^3) sqrt(log T + 3 log log T)
                    + (4 e + 3 / D_a) log log T
                    + 2 (D'_a / D_a)^2 + 4 ].
    """
    if not T >= 3:
        raise ValueError(f"T must be >= 3, got {T!r}")
    gaps, d, dp = _divergences(model)
    log_t = math.log(T)
    loglog_t = math.log(log_t)
    budget = log_t + 3.0 * loglog_t
    total = 0.0
    for a in range(gaps.size):
        if gaps[a] == 0.0:
            continue
        if d[a] == 0.0:
            raise UnidentifiableModel(
                f"arm {a} has zero feedback divergence from the optimal arm"
            )
        bracket = (
            log_t / d[a]
            + math.sqrt(2.0 * math.pi) * math.sqrt(dp[a] ** 2 / d[a] ** 3) * math.sqrt(budget)
            + (4.0 * math.e + 3.0 / d[a]) * loglog_t
            + 2.0 * (dp[a] / d[a]) ** 2
            + 4.0
        )
        total += gaps[a] * bracket
    return total


def ldp_epsilon_factor(epsilon: float) -> float:
    """((e^eps - 1) / (e^eps + 1))^2, computed as tanh(eps/2)^2 for stability."""
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon!r}")
    return math.tanh(epsilon / 2.0) ** 2


def ldp_ub_curve(gaps: np.ndarray, epsilon: float, T: float) -> float:
    """Leading-order regret upper bound under symmetric epsilon-private feedback.

    Sum over suboptimal arms of 2 log T / (Delta_a * factor(eps)); the
    lower-order sqrt(log T) contribution has no stated constant and is
    deliberately omitted, so emitted curves are labeled leading-order.
    """
    if not T >= 2:
        raise ValueError(f"T must be >= 2, got {T!r}")
    factor = ldp_epsilon_factor(epsilon)
    gaps = np.asarray(gaps, dtype=np.float64)
    if gaps.size and gaps.min() < 0.0:
        raise ValueError("gaps must be nonnegative")
    total = 0.0
    for g in gaps:
        if g > 0.0:
            total += 2.0 * math.log(T) / (g * factor)
    return total


def identifiability_check(
    model: CorruptBanditModel, threshold: float = 1e-12
) -> list[tuple[int, float]]:
    """Suboptimal arms whose feedback divergence from the optimum is below
    the threshold, as (arm, divergence) pairs; empty means identifiable."""
    gaps, d, _ = _divergences(model)
    return [
        (a, float(d[a]))
        for a in range(gaps.size)
        if gaps[a] > 0.0 and d[a] < threshold
    ]
