"""Feedback corruption: randomized response channels and mean corruption maps.

A randomized response scheme keeps a Bernoulli reward with probability p00
(when the reward is 0) or p11 (when it is 1) and flips it otherwise.  The
induced map from reward mean to feedback mean is the linear function
g(x) = (1 - p00) + (p00 + p11 - 1) x, invertible exactly when the slope
p00 + p11 - 1 is nonzero.

CorruptionFunction is the strictly monotone [0,1] -> [0,1] map consumed by
the corruption-aware policies.  Linear instances invert in closed form and
deliberately do not clamp, since confidence bounds may sit outside [0,1].
Custom instances carry an arbitrary callable, validated by a strict
monotonicity probe on a 1e-3 grid, and invert by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from ._rng import RandomStream, uniform01
from .klmath import BISECTION_MAX_ITER, BISECTION_TOL

_PROBE_POINTS = 1001


class NonInvertibleScheme(ValueError):
    """Raised when a corruption map with zero slope would need inverting."""


@dataclass(frozen=True)
class RandomizedResponseScheme:
    """Binary channel with P(F=0|R=0) = p00 and P(F=1|R=1) = p11."""

    p00: float
    p11: float

    def __post_init__(self) -> None:
        for name in ("p00", "p11"):
            v = getattr(self, name)
            if math.isnan(v) or not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")

    @property
    def slope(self) -> float:
        return self.p00 + self.p11 - 1.0

    @property
    def invertible(self) -> bool:
        return self.slope != 0.0

    def matrix(self) -> np.ndarray:
        """Column-stochastic channel matrix, columns indexed by the true reward."""
        return np.array(
            [[self.p00, 1.0 - self.p11], [1.0 - self.p00, self.p11]], dtype=np.float64
        )


@njit(cache=True, nogil=True)
def channel_output(p00, p11, reward, u):
    if reward == 1:
        return 1 if u < p11 else 0
    return 0 if u < p00 else 1


@njit(cache=True, nogil=True)
def _feedback_batch(p00, p11, rewards, state, out):
    for i in range(rewards.size):
        u = uniform01(state)
        out[i] = channel_output(p00, p11, rewards[i], u)


def apply_scheme(scheme: RandomizedResponseScheme, reward: int, rng: RandomStream) -> int:
    """Pass one reward bit through the channel, consuming one uniform draw."""
    if reward not in (0, 1):
        raise ValueError(f"reward must be 0 or 1, got {reward!r}")
    u = uniform01(rng.state)
    return int(channel_output(scheme.p00, scheme.p11, reward, u))


def sample_feedback(
    scheme: RandomizedResponseScheme, rewards: np.ndarray, rng: RandomStream
) -> np.ndarray:
    """Vectorized apply_scheme over a reward array, one draw per element."""
    rewards = np.ascontiguousarray(rewards, dtype=np.int64)
    out = np.empty(rewards.size, dtype=np.int64)
    _feedback_batch(scheme.p00, scheme.p11, rewards, rng.state, out)
    return out


class CorruptionFunction:
    """Strictly monotone map from reward mean to feedback mean.

    Use the classmethod constructors: ``linear``, ``identity``, ``custom``.
    """

    __slots__ = ("kind", "intercept", "slope", "_fn", "_increasing")

    def __init__(
        self,
        kind: str,
        intercept: float,
        slope: float,
        fn: Callable[[float], float] | None,
        increasing: bool,
    ):
        self.kind = kind
        self.intercept = intercept
        self.slope = slope
        self._fn = fn
        self._increasing = increasing

    @classmethod
    def linear(cls, intercept: float, slope: float) -> "CorruptionFunction":
        if slope == 0.0:
            raise NonInvertibleScheme("linear corruption with zero slope is not invertible")
        lo, hi = intercept, intercept + slope
        for name, v in (("g(0)", lo), ("g(1)", hi)):
            if math.isnan(v) or not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        return cls("linear", float(intercept), float(slope), None, slope > 0.0)

    @classmethod
    def identity(cls) -> "CorruptionFunction":
        return cls.linear(0.0, 1.0)

    @classmethod
    def custom(cls, fn: Callable[[float], float], increasing: bool) -> "CorruptionFunction":
        grid = np.linspace(0.0, 1.0, _PROBE_POINTS)
        vals = np.array([float(fn(x)) for x in grid])
        if np.isnan(vals).any() or vals.min() < 0.0 or vals.max() > 1.0:
            raise ValueError("custom corruption must map [0, 1] into [0, 1]")
        steps = np.diff(vals)
        if increasing and not (steps > 0.0).all():
            raise ValueError("custom corruption declared increasing is not strictly increasing")
        if not increasing and not (steps < 0.0).all():
            raise ValueError("custom corruption declared decreasing is not strictly decreasing")
        return cls("custom", math.nan, math.nan, fn, increasing)

    @property
    def increasing(self) -> bool:
        return self._increasing

    def forward(self, x: float) -> float:
        """g(x) for x in [0, 1]; the result is clamped into [0, 1]."""
        x = float(x)
        if math.isnan(x) or not 0.0 <= x <= 1.0:
            raise ValueError(f"x must lie in [0, 1], got {x!r}")
        if self.kind == "linear":
            v = self.intercept + self.slope * x
        else:
            v = float(self._fn(x))
        return min(1.0, max(0.0, v))

    def __call__(self, x: float) -> float:
        return self.forward(x)

    def inverse(self, y: float) -> float:
        """g^{-1}(y).

        Linear functions invert in closed form and accept any real y, so
        optimism can push estimates outside [0, 1].  Custom functions bisect
        on [0, 1] to absolute tolerance 1e-9 and send out-of-range targets to
        the nearer endpoint.
        """
        y = float(y)
        if math.isnan(y):
            raise ValueError("cannot invert NaN")
        if self.kind == "linear":
            return (y - self.intercept) / self.slope
        lo_val, hi_val = self._fn(0.0), self._fn(1.0)
        if self._increasing:
            if y <= lo_val:
                return 0.0
            if y >= hi_val:
                return 1.0
        else:
            if y >= lo_val:
                return 0.0
            if y <= hi_val:
                return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(BISECTION_MAX_ITER):
            if hi - lo <= BISECTION_TOL:
                break
            mid = 0.5 * (lo + hi)
            below = float(self._fn(mid)) < y
            if below == self._increasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def __repr__(self) -> str:
        if self.kind == "linear":
            return f"CorruptionFunction.linear({self.intercept!r}, {self.slope!r})"
        word = "increasing" if self._increasing else "decreasing"
        return f"CorruptionFunction.custom(<fn>, {word})"


def mean_function_of(scheme: RandomizedResponseScheme) -> CorruptionFunction:
    """The linear mean map g(x) = (1 - p00) + slope * x induced by a channel."""
    if not scheme.invertible:
        raise NonInvertibleScheme(
            f"scheme with p00={scheme.p00!r}, p11={scheme.p11!r} has zero slope"
        )
    return CorruptionFunction.linear(1.0 - scheme.p00, scheme.slope)


def ldp_scheme(epsilon: float) -> RandomizedResponseScheme:
    """Symmetric randomized response at privacy level epsilon.

    Both diagonal entries equal e^eps / (1 + e^eps), computed in the
    overflow-safe form 1 / (1 + e^-eps).
    """
    epsilon = float(epsilon)
    if math.isnan(epsilon) or epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon!r}")
    p = 1.0 / (1.0 + math.exp(-epsilon))
    return RandomizedResponseScheme(p, p)


def ldp_level(scheme: RandomizedResponseScheme) -> float:
    """Differential privacy level: log of the worst likelihood ratio.

    Ratios compare P(F=f | R=0) against P(F=f | R=1) in both directions for
    both outputs.  Any zero channel entry makes an output fully revealing,
    giving +inf.
    """
    entries = (scheme.p00, 1.0 - scheme.p00, scheme.p11, 1.0 - scheme.p11)
    if min(entries) == 0.0:
        return math.inf
    r0 = scheme.p00 / (1.0 - scheme.p11)
    r1 = scheme.p11 / (1.0 - scheme.p00)
    worst = max(r0, 1.0 / r0, r1, 1.0 / r1)
    return math.log(worst)
