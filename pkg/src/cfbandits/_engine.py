"""Compiled replication loop.

Composes the selection, channel, and update kernels into one nopython loop
over the horizon.  Because these are the very kernels behind the public
per-step API, a harness run and a hand-stepped policy consume the random
streams identically.  nogil lets replications run on a thread pool.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .environment import pull_kernel
from .policies import select_kernel, update_kernel


@njit(cache=True, nogil=True)
def run_loop(
    code,
    inner,
    horizon,
    mu,
    p00,
    p11,
    intercept,
    slope,
    gaps,
    checkpoints,
    env_state,
    pol_state,
    aux_state,
    regret_out,
    arms_out,
    record_arms,
):
    K = mu.size
    N = np.zeros(K, dtype=np.int64)
    fsums = np.zeros(K, dtype=np.int64)
    success = np.zeros(K, dtype=np.int64)
    fail = np.zeros(K, dtype=np.int64)
    psums = np.zeros(K, dtype=np.float64)
    cum = 0.0
    ci = 0
    for t in range(horizon):
        arm = select_kernel(
            code, inner, t, N, fsums, success, fail, psums, intercept, slope, pol_state
        )
        r, fb = pull_kernel(mu[arm], p00[arm], p11[arm], env_state)
        update_kernel(
            code, inner, arm, fb, N, fsums, success, fail, psums, intercept, slope, aux_state
        )
        cum += gaps[arm]
        if record_arms:
            arms_out[t] = arm
        if ci < checkpoints.size and t + 1 == checkpoints[ci]:
            regret_out[ci] = cum
            ci += 1
