"""Arm-selection policies: corruption-aware algorithms and classical baselines.

Corruption-aware policies (tags ``klucb-cf``, ``ts-cf``, ``ucb-cf``) form a
confidence bound or posterior sample in feedback space and map it back through
the inverse corruption function before comparing arms.  Classical baselines
(``klucb``, ``ucb1``, ``ts``) treat feedback as if it were reward.  The
wrapper baselines (``wrapper:klucb``, ``wrapper:ucb1``, ``wrapper:ts``) invert
each feedback value individually and hand the resulting pseudo-rewards to the
classical policy.

Index policies pull each arm once in arm order (rounds t < K), then maximize
their index with ties broken uniformly at random; one uniform is consumed only
when a tie actually occurs.  Thompson variants sample from round one and break
ties by lowest index.  The confidence budget is f(t) = log t + 3 log log t
evaluated at the current step count, shared by every index policy so that the
corruption handling is the only difference between them.

All selection and update rules are numba kernels; the compiled replication
loop in the harness calls these same kernels, so stepping a policy by hand
reproduces a harness run draw for draw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from ._rng import RandomStream, beta_sample, uniform01
from .corruption import CorruptionFunction
from .klmath import exploration_value, kl_lower, kl_upper

KLUCB_CF = 0
TS_CF = 1
UCB_CF = 2
KLUCB = 3
UCB1 = 4
TS = 5
WRAPPER = 6

POLICY_TAGS = (
    "klucb-cf",
    "ts-cf",
    "ucb-cf",
    "klucb",
    "ucb1",
    "ts",
    "wrapper:klucb",
    "wrapper:ucb1",
    "wrapper:ts",
)

_BASE_CODES = {
    "klucb-cf": KLUCB_CF,
    "ts-cf": TS_CF,
    "ucb-cf": UCB_CF,
    "klucb": KLUCB,
    "ucb1": UCB1,
    "ts": TS,
}


@dataclass(frozen=True)
class PolicyKind:
    """A validated policy tag, e.g. ``klucb-cf`` or ``wrapper:ts``."""

    tag: str

    def __post_init__(self) -> None:
        if self.tag not in POLICY_TAGS:
            raise ValueError(
                f"unknown policy tag {self.tag!r}; valid tags: {', '.join(POLICY_TAGS)}"
            )

    @property
    def is_wrapper(self) -> bool:
        return self.tag.startswith("wrapper:")

    @property
    def inner(self) -> str | None:
        return self.tag.split(":", 1)[1] if self.is_wrapper else None

    @property
    def codes(self) -> tuple[int, int]:
        """(policy code, inner code) for the compiled kernels."""
        if self.is_wrapper:
            return WRAPPER, _BASE_CODES[self.inner]
        return _BASE_CODES[self.tag], -1

    def __str__(self) -> str:
        return self.tag


@dataclass
class PolicyState:
    """Per-arm sufficient statistics for any policy in this module.

    pseudo_sums holds the wrapper's running sum of inverted feedback values
    and stays zero for every other policy.
    """

    N: np.ndarray
    feedback_sums: np.ndarray
    success: np.ndarray
    fail: np.ndarray
    pseudo_sums: np.ndarray
    t: int

    @classmethod
    def fresh(cls, n_arms: int) -> "PolicyState":
        if int(n_arms) != n_arms or n_arms < 1:
            raise ValueError(f"n_arms must be a positive integer, got {n_arms!r}")
        z = lambda: np.zeros(int(n_arms), dtype=np.int64)
        return cls(z(), z(), z(), z(), np.zeros(int(n_arms), dtype=np.float64), 0)

    @property
    def n_arms(self) -> int:
        return int(self.N.size)


@njit(cache=True, nogil=True)
def _argmax_first(values):
    best = values[0]
    arg = 0
    for a in range(1, values.size):
        if values[a] > best:
            best = values[a]
            arg = a
    return arg


@njit(cache=True, nogil=True)
def _argmax_random_tie(values, state):
    # One uniform is drawn only when two or more arms share the maximum.
    best = values[0]
    count = 1
    for a in range(1, values.size):
        if values[a] > best:
            best = values[a]
            count = 1
        elif values[a] == best:
            count += 1
    if count == 1:
        return _argmax_first(values)
    pick = int(uniform01(state) * count)
    if pick >= count:
        pick = count - 1
    seen = 0
    for a in range(values.size):
        if values[a] == best:
            if seen == pick:
                return a
            seen += 1
    return values.size - 1


@njit(cache=True, nogil=True)
def _index_values(code, inner, budget, N, fsums, psums, intercept, slope, out):
    for a in range(N.size):
        n = float(N[a])
        if code == KLUCB_CF:
            lam = fsums[a] / n
            if slope[a] > 0.0:
                q = kl_upper(lam, n, budget)
            else:
                q = kl_lower(lam, n, budget)
            out[a] = (q - intercept[a]) / slope[a]
        elif code == UCB_CF:
            lam = fsums[a] / n
            pad = np.sqrt(budget / (2.0 * n))
            if slope[a] > 0.0:
                out[a] = (lam + pad - intercept[a]) / slope[a]
            else:
                out[a] = (lam - pad - intercept[a]) / slope[a]
        elif code == KLUCB or (code == WRAPPER and inner == KLUCB):
            mean = fsums[a] / n
            if code == WRAPPER:
                mean = min(1.0, max(0.0, psums[a] / n))
            out[a] = kl_upper(mean, n, budget)
        else:  # UCB1, plain or wrapped
            mean = fsums[a] / n
            if code == WRAPPER:
                mean = min(1.0, max(0.0, psums[a] / n))
            out[a] = mean + np.sqrt(budget / (2.0 * n))


@njit(cache=True, nogil=True)
def _ts_values(code, success, fail, intercept, slope, state, out):
    for a in range(success.size):
        theta = beta_sample(state, float(success[a]) + 1.0, float(fail[a]) + 1.0)
        if code == TS_CF:
            out[a] = (theta - intercept[a]) / slope[a]
        else:
            out[a] = theta


@njit(cache=True, nogil=True)
def select_kernel(code, inner, t, N, fsums, success, fail, psums, intercept, slope, state):
    K = N.size
    is_ts = code == TS_CF or code == TS or (code == WRAPPER and inner == TS)
    if not is_ts and t < K:
        return t
    values = np.empty(K, dtype=np.float64)
    if is_ts:
        _ts_values(code, success, fail, intercept, slope, state, values)
        return _argmax_first(values)
    budget = exploration_value(float(t))
    _index_values(code, inner, budget, N, fsums, psums, intercept, slope, values)
    return _argmax_random_tie(values, state)


@njit(cache=True, nogil=True)
def update_kernel(code, inner, arm, feedback, N, fsums, success, fail, psums, intercept, slope, aux_state):
    N[arm] += 1
    fsums[arm] += feedback
    if code == WRAPPER:
        pseudo = (feedback - intercept[arm]) / slope[arm]
        psums[arm] += pseudo
        if inner == TS:
            p = min(1.0, max(0.0, pseudo))
            if uniform01(aux_state) < p:
                success[arm] += 1
            else:
                fail[arm] += 1
            return
    if feedback == 1:
        success[arm] += 1
    else:
        fail[arm] += 1


def _linear_params(functions: Sequence[CorruptionFunction]) -> tuple[np.ndarray, np.ndarray] | None:
    if any(f.kind != "linear" for f in functions):
        return None
    intercept = np.array([f.intercept for f in functions], dtype=np.float64)
    slope = np.array([f.slope for f in functions], dtype=np.float64)
    return intercept, slope


_NO_PARAMS = (np.zeros(0, dtype=np.float64), np.zeros(0, dtype=np.float64))


def _check_functions(state: PolicyState, functions: Sequence[CorruptionFunction]) -> None:
    if len(functions) != state.n_arms:
        raise ValueError(
            f"got {len(functions)} corruption functions for {state.n_arms} arms"
        )
    for f in functions:
        if not isinstance(f, CorruptionFunction):
            raise TypeError(f"expected CorruptionFunction, got {type(f).__name__}")


def _check_counts(state: PolicyState) -> None:
    if state.t >= state.n_arms and int(state.N.min()) < 1:
        raise ValueError("index policies need every arm pulled at least once after initialization")


def _index_select_custom(
    code: int, state: PolicyState, functions: Sequence[CorruptionFunction], rng: RandomStream
) -> int:
    budget = exploration_value(float(state.t))
    values = np.empty(state.n_arms, dtype=np.float64)
    for a in range(state.n_arms):
        n = float(state.N[a])
        lam = state.feedback_sums[a] / n
        if code == KLUCB_CF:
            q = kl_upper(lam, n, budget) if functions[a].increasing else kl_lower(lam, n, budget)
        else:
            pad = float(np.sqrt(budget / (2.0 * n)))
            q = lam + pad if functions[a].increasing else lam - pad
        values[a] = functions[a].inverse(q)
    return int(_argmax_random_tie(values, rng.state))


def select_klucb_cf(
    state: PolicyState, functions: Sequence[CorruptionFunction], rng: RandomStream
) -> int:
    """KL confidence bound in feedback space, inverted through each arm's g.

    Index_a = g_a^{-1}(u_a) for increasing g_a and g_a^{-1}(l_a) for
    decreasing g_a, where u_a / l_a are the upper and lower KL inversions of
    the empirical feedback mean at budget f(t).
    """
    _check_functions(state, functions)
    if state.t < state.n_arms:
        return state.t
    _check_counts(state)
    params = _linear_params(functions)
    if params is None:
        return _index_select_custom(KLUCB_CF, state, functions, rng)
    return int(
        select_kernel(
            KLUCB_CF, -1, state.t, state.N, state.feedback_sums, state.success,
            state.fail, state.pseudo_sums, params[0], params[1], rng.state,
        )
    )


def select_ucb_cf(
    state: PolicyState, functions: Sequence[CorruptionFunction], rng: RandomStream
) -> int:
    """Hoeffding-style bound g_a^{-1}(mean +/- sqrt(f(t)/2N)), sign by direction.

    The inversion argument is left unclamped for linear functions; custom
    functions send out-of-range arguments to the nearer endpoint.
    """
    _check_functions(state, functions)
    if state.t < state.n_arms:
        return state.t
    _check_counts(state)
    params = _linear_params(functions)
    if params is None:
        return _index_select_custom(UCB_CF, state, functions, rng)
    return int(
        select_kernel(
            UCB_CF, -1, state.t, state.N, state.feedback_sums, state.success,
            state.fail, state.pseudo_sums, params[0], params[1], rng.state,
        )
    )


def select_ts_cf(
    state: PolicyState, functions: Sequence[CorruptionFunction], rng: RandomStream
) -> int:
    """Thompson sampling through the corruption maps.

    Draws theta_a ~ Beta(success_a + 1, fail_a + 1) in arm order, one draw per
    arm, and maximizes g_a^{-1}(theta_a); ties go to the lowest arm index.
    """
    _check_functions(state, functions)
    params = _linear_params(functions)
    if params is None:
        values = np.empty(state.n_arms, dtype=np.float64)
        for a in range(state.n_arms):
            theta = beta_sample(
                rng.state, float(state.success[a]) + 1.0, float(state.fail[a]) + 1.0
            )
            values[a] = functions[a].inverse(theta)
        return int(_argmax_first(values))
    return int(
        select_kernel(
            TS_CF, -1, state.t, state.N, state.feedback_sums, state.success,
            state.fail, state.pseudo_sums, params[0], params[1], rng.state,
        )
    )


def select_baseline(state: PolicyState, kind: str | PolicyKind, rng: RandomStream) -> int:
    """Classical kl-UCB / UCB1 / TS run directly on the corrupted feedback."""
    tag = kind.tag if isinstance(kind, PolicyKind) else str(kind)
    if tag not in ("klucb", "ucb1", "ts"):
        raise ValueError(f"baseline kind must be klucb, ucb1 or ts, got {tag!r}")
    code = _BASE_CODES[tag]
    if code != TS:
        if state.t < state.n_arms:
            return state.t
        _check_counts(state)
    return int(
        select_kernel(
            code, -1, state.t, state.N, state.feedback_sums, state.success,
            state.fail, state.pseudo_sums, _NO_PARAMS[0], _NO_PARAMS[1], rng.state,
        )
    )


def select_wrapper(
    state: PolicyState,
    inner: str | PolicyKind,
    functions: Sequence[CorruptionFunction],
    rng: RandomStream,
) -> int:
    """Inner classical policy fed with inverted feedback.

    update_wrapper maintains per-arm sums of unclamped pseudo-rewards
    g_a^{-1}(F); at selection time the inner index policy sees the pseudo-mean
    clamped into [0, 1].  The inner TS reads the success/fail counters that
    update_wrapper fills via Bernoulli conversion.
    """
    tag = inner.tag if isinstance(inner, PolicyKind) else str(inner)
    if tag.startswith("wrapper:"):
        tag = tag.split(":", 1)[1]
    if tag not in ("klucb", "ucb1", "ts"):
        raise ValueError(f"wrapper inner policy must be klucb, ucb1 or ts, got {tag!r}")
    _check_functions(state, functions)
    inner_code = _BASE_CODES[tag]
    if inner_code != TS:
        if state.t < state.n_arms:
            return state.t
        _check_counts(state)
    return int(
        select_kernel(
            WRAPPER, inner_code, state.t, state.N, state.feedback_sums, state.success,
            state.fail, state.pseudo_sums, _NO_PARAMS[0], _NO_PARAMS[1], rng.state,
        )
    )


def update(state: PolicyState, arm: int, feedback: int) -> PolicyState:
    """Record one feedback bit: counts, feedback sum, Beta counters, step."""
    if not 0 <= arm < state.n_arms:
        raise IndexError(f"arm {arm} out of range for {state.n_arms} arms")
    if feedback not in (0, 1):
        raise ValueError(f"feedback must be 0 or 1, got {feedback!r}")
    state.N[arm] += 1
    state.feedback_sums[arm] += feedback
    if feedback == 1:
        state.success[arm] += 1
    else:
        state.fail[arm] += 1
    state.t += 1
    return state


def update_wrapper(
    state: PolicyState,
    arm: int,
    feedback: int,
    functions: Sequence[CorruptionFunction],
    inner: str | PolicyKind,
    aux_rng: RandomStream,
) -> PolicyState:
    """Wrapper bookkeeping: pseudo-reward sum, plus Bernoulli conversion for TS.

    The pseudo-reward g_a^{-1}(F) is accumulated unclamped.  When the inner
    policy is TS, the success/fail counters are driven by one auxiliary draw
    against clamp(pseudo, 0, 1) instead of the raw feedback bit, since a
    black-box TS only consumes binary outcomes.
    """
    if not 0 <= arm < state.n_arms:
        raise IndexError(f"arm {arm} out of range for {state.n_arms} arms")
    if feedback not in (0, 1):
        raise ValueError(f"feedback must be 0 or 1, got {feedback!r}")
    tag = inner.tag if isinstance(inner, PolicyKind) else str(inner)
    if tag.startswith("wrapper:"):
        tag = tag.split(":", 1)[1]
    _check_functions(state, functions)
    pseudo = functions[arm].inverse(float(feedback))
    state.N[arm] += 1
    state.feedback_sums[arm] += feedback
    state.pseudo_sums[arm] += pseudo
    if tag == "ts":
        p = min(1.0, max(0.0, pseudo))
        if uniform01(aux_rng.state) < p:
            state.success[arm] += 1
        else:
            state.fail[arm] += 1
    else:
        if feedback == 1:
            state.success[arm] += 1
        else:
            state.fail[arm] += 1
    state.t += 1
    return state


def select(
    kind: PolicyKind,
    state: PolicyState,
    functions: Sequence[CorruptionFunction] | None,
    rng: RandomStream,
) -> int:
    """Dispatch selection by policy tag; baselines ignore the functions."""
    if kind.is_wrapper:
        return select_wrapper(state, kind.inner, functions, rng)
    if kind.tag == "klucb-cf":
        return select_klucb_cf(state, functions, rng)
    if kind.tag == "ts-cf":
        return select_ts_cf(state, functions, rng)
    if kind.tag == "ucb-cf":
        return select_ucb_cf(state, functions, rng)
    return select_baseline(state, kind.tag, rng)


def update_for(
    kind: PolicyKind,
    state: PolicyState,
    arm: int,
    feedback: int,
    functions: Sequence[CorruptionFunction] | None,
    aux_rng: RandomStream | None,
) -> PolicyState:
    """Dispatch the update matching `select`: wrapper bookkeeping or plain."""
    if kind.is_wrapper:
        return update_wrapper(state, arm, feedback, functions, kind.inner, aux_rng)
    return update(state, arm, feedback)
