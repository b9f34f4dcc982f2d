"""Corrupt bandit environments: Bernoulli arms observed through channels.

Pulling arm a draws a Bernoulli(mu_a) reward, passes it through that arm's
randomized response scheme, and returns both bits.  The learner is only meant
to see the feedback bit; the true reward is exposed for regret accounting and
tests.  Each pull consumes exactly two uniforms from the environment stream
(reward first, then channel), which fixes the draw order all runners share.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from ._rng import RandomStream, uniform01
from .corruption import (
    CorruptionFunction,
    RandomizedResponseScheme,
    channel_output,
    mean_function_of,
)


class PullOutcome(NamedTuple):
    reward: int
    feedback: int


@njit(cache=True, nogil=True)
def pull_kernel(mu, p00, p11, state):
    reward = 1 if uniform01(state) < mu else 0
    u = uniform01(state)
    return reward, channel_output(p00, p11, reward, u)


@njit(cache=True, nogil=True)
def _pull_batch(mu, p00, p11, state, rewards, feedbacks):
    for i in range(rewards.size):
        r, f = pull_kernel(mu, p00, p11, state)
        rewards[i] = r
        feedbacks[i] = f


class CorruptBanditModel:
    """K >= 2 Bernoulli arms, each with its own randomized response scheme."""

    def __init__(
        self,
        means: Sequence[float],
        schemes: Sequence[RandomizedResponseScheme],
    ):
        means = np.asarray(means, dtype=np.float64).copy()
        if means.ndim != 1 or means.size < 2:
            raise ValueError("a model needs a 1-d vector of at least 2 arm means")
        if np.isnan(means).any() or means.min() < 0.0 or means.max() > 1.0:
            raise ValueError("arm means must lie in [0, 1]")
        if len(schemes) != means.size:
            raise ValueError(
                f"got {len(schemes)} schemes for {means.size} arms; need one per arm"
            )
        for s in schemes:
            if not isinstance(s, RandomizedResponseScheme):
                raise TypeError(f"expected RandomizedResponseScheme, got {type(s).__name__}")
        means.setflags(write=False)
        self.means = means
        self.schemes = tuple(schemes)
        self._functions: tuple[CorruptionFunction, ...] | None = None

    @property
    def n_arms(self) -> int:
        return int(self.means.size)

    @property
    def a_star(self) -> int:
        """Index of the optimal arm; ties go to the lowest index."""
        return int(np.argmax(self.means))

    @property
    def feedback_means(self) -> np.ndarray:
        """lambda_a = g_a(mu_a), the mean of the observed feedback per arm."""
        lam = np.array(
            [
                min(1.0, max(0.0, (1.0 - s.p00) + s.slope * m))
                for m, s in zip(self.means, self.schemes)
            ]
        )
        lam.setflags(write=False)
        return lam

    @property
    def functions(self) -> tuple[CorruptionFunction, ...]:
        """Per-arm mean maps; raises NonInvertibleScheme on a zero-slope arm."""
        if self._functions is None:
            self._functions = tuple(mean_function_of(s) for s in self.schemes)
        return self._functions

    def gaps(self) -> np.ndarray:
        """Reward-mean gaps Delta_a = mu_star - mu_a (zero at the optimum)."""
        return self.means.max() - self.means

    def __repr__(self) -> str:
        return f"CorruptBanditModel(K={self.n_arms}, means={self.means.tolist()!r})"


def _check_arm(model: CorruptBanditModel, arm: int) -> int:
    arm = int(arm)
    if not 0 <= arm < model.n_arms:
        raise IndexError(f"arm {arm} out of range for {model.n_arms} arms")
    return arm


def pull(model: CorruptBanditModel, arm: int, rng: RandomStream) -> PullOutcome:
    """One pull of one arm: (reward, feedback), two uniforms consumed."""
    arm = _check_arm(model, arm)
    s = model.schemes[arm]
    r, f = pull_kernel(model.means[arm], s.p00, s.p11, rng.state)
    return PullOutcome(int(r), int(f))


def pull_many(
    model: CorruptBanditModel, arm: int, n: int, rng: RandomStream
) -> tuple[np.ndarray, np.ndarray]:
    """n pulls of one arm; returns (rewards, feedbacks) int64 arrays."""
    arm = _check_arm(model, arm)
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    rewards = np.empty(int(n), dtype=np.int64)
    feedbacks = np.empty(int(n), dtype=np.int64)
    s = model.schemes[arm]
    _pull_batch(model.means[arm], s.p00, s.p11, rng.state, rewards, feedbacks)
    return rewards, feedbacks
