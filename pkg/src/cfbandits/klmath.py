"""Bernoulli KL divergence, its inversions, and the exploration schedule.

Conventions for d(x, y) = x log(x/y) + (1-x) log((1-x)/(1-y)):

* 0 log 0 = 0, so d(0, y) = -log(1-y) and d(1, y) = -log(y);
* d(x, y) = +inf when y is 0 or 1 and x differs from it;
* d(x, x) = 0 for every x in [0, 1].

The upper inversion u(x, n, f) is the largest q with n d(x, q) <= f, found by
bisection on [x, 1] to absolute tolerance 1e-9 (at most 100 halvings); the
lower inversion mirrors it on [0, x].  Both endpoints of the returned bracket
are feasible, so the result never overshoots the budget.

The exploration schedule is f(t) = log t + 3 log log t with each term clamped
at zero so small t never produces a negative budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

BISECTION_TOL = 1e-9
BISECTION_MAX_ITER = 100


@njit(cache=True, nogil=True)
def kl_div(x, y):
    if x == y:
        return 0.0
    if y <= 0.0 or y >= 1.0:
        return np.inf
    acc = 0.0
    if x > 0.0:
        acc += x * np.log(x / y)
    if x < 1.0:
        acc += (1.0 - x) * np.log((1.0 - x) / (1.0 - y))
    # cancellation near x == y can leave a tiny negative; the true value is >= 0
    return acc if acc > 0.0 else 0.0


@njit(cache=True, nogil=True)
def kl_deriv(x, y):
    # Derivative in the first argument; -inf at x=0 and +inf at x=1.
    if x <= 0.0:
        return -np.inf
    if x >= 1.0:
        return np.inf
    return np.log(x / y) - np.log((1.0 - x) / (1.0 - y))


@njit(cache=True, nogil=True)
def kl_upper(x, n, budget):
    if budget <= 0.0:
        # no q > x satisfies n d(x, q) <= 0, and float evaluation of d near x
        # is too noisy to let bisection discover that on its own
        return x
    hi = 1.0
    if n * kl_div(x, hi) <= budget:
        return 1.0
    lo = x
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if n * kl_div(x, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def kl_lower(x, n, budget):
    if budget <= 0.0:
        return x
    lo = 0.0
    if n * kl_div(x, lo) <= budget:
        return 0.0
    hi = x
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if n * kl_div(x, mid) <= budget:
            hi = mid
        else:
            lo = mid
    return hi


@njit(cache=True, nogil=True)
def exploration_value(t):
    lt = np.log(t)
    inner = lt if lt > 1.0 else 1.0
    return max(lt, 0.0) + 3.0 * max(np.log(inner), 0.0)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def bernoulli_kl(x: float, y: float) -> float:
    """d(x, y) for Bernoulli means x, y in [0, 1].  Always >= 0, may be +inf."""
    return float(kl_div(_check_unit("x", x), _check_unit("y", y)))


def bernoulli_kl_derivative(x: float, y: float) -> float:
    """Derivative of d(., y) at x; requires y strictly inside (0, 1)."""
    y = float(y)
    if not 0.0 < y < 1.0:
        raise ValueError(f"y must lie in (0, 1), got {y!r}")
    return float(kl_deriv(_check_unit("x", x), y))


@dataclass(frozen=True)
class KlBudget:
    """An inversion query: empirical mean, observation count, divergence budget."""

    mean_hat: float
    count: int
    budget: float

    def __post_init__(self) -> None:
        _check_unit("mean_hat", self.mean_hat)
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"count must be a positive integer, got {self.count!r}")
        if math.isnan(self.budget) or self.budget < 0.0:
            raise ValueError(f"budget must be >= 0, got {self.budget!r}")


def kl_upper_inverse(b: KlBudget) -> float:
    """Largest q in [mean_hat, 1] with count * d(mean_hat, q) <= budget."""
    return float(kl_upper(b.mean_hat, float(b.count), b.budget))


def kl_lower_inverse(b: KlBudget) -> float:
    """Smallest q in [0, mean_hat] with count * d(mean_hat, q) <= budget."""
    return float(kl_lower(b.mean_hat, float(b.count), b.budget))


def exploration_function(t: int) -> float:
    """Confidence budget f(t) = log t + 3 log log t, clamped termwise at zero."""
    if int(t) != t or t < 1:
        raise ValueError(f"t must be an integer >= 1, got {t!r}")
    return float(exploration_value(float(t)))
