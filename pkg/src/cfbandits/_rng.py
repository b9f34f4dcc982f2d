"""Deterministic pseudo-random streams for the simulation engine.

Every stochastic component draws from a named xoshiro256++ stream.  Stream
states are derived from a master seed plus key tokens (purpose string, policy
tag, replication index), so any stream can be reconstructed in isolation and
results never depend on execution order or worker count.

The generator state is a 4-element uint64 array seeded through SplitMix64.
Uniform doubles take the top 53 bits of each output word.  Beta variates are
built from two Marsaglia-Tsang Gamma draws, normals from the cosine half of a
Box-Muller pair.  All samplers are numba kernels shared with the compiled
replication loop, which is what makes per-step and batched execution agree
draw for draw.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix64(z: int) -> int:
    """One SplitMix64 step: advance by the golden-gamma and finalize."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a UTF-8 string, used to turn key tokens into integers."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_seed(master_seed: int, *tokens: int | str) -> int:
    """Fold key tokens into a master seed, one SplitMix64 step per token.

    String tokens are hashed with FNV-1a first.  The result is a 64-bit seed
    that differs whenever any token differs, giving independent streams for
    (purpose, policy tag, replication) triples.
    """
    h = master_seed & _MASK64
    for token in tokens:
        t = fnv1a64(token) if isinstance(token, str) else (int(token) & _MASK64)
        h = _mix64(h ^ t)
    return h


def seed_state(seed: int) -> np.ndarray:
    """Expand a 64-bit seed into a xoshiro256++ state via four SplitMix64 draws."""
    s = seed & _MASK64
    state = np.empty(4, dtype=np.uint64)
    for i in range(4):
        s = (s + _GOLDEN) & _MASK64
        z = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        state[i] = (z ^ (z >> 31)) & _MASK64
    if not state.any():
        state[0] = 1  # all-zero is the one forbidden xoshiro state
    return state


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << k) | (x >> (np.uint64(64) - k))


@njit(cache=True, nogil=True)
def next_u64(state):
    """Advance a xoshiro256++ state in place and return the next output word."""
    result = _rotl(state[0] + state[3], np.uint64(23)) + state[0]
    t = state[1] << np.uint64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], np.uint64(45))
    return result


@njit(cache=True, nogil=True)
def uniform01(state):
    """Uniform double in [0, 1) from the top 53 bits of one output word."""
    return (next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True)
def standard_normal(state):
    # Cosine half of a Box-Muller pair; log(1 - u) keeps the argument in (0, 1].
    u1 = uniform01(state)
    u2 = uniform01(state)
    return np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * np.pi * u2)


@njit(cache=True, nogil=True)
def standard_gamma(state, shape):
    """Marsaglia-Tsang squeeze sampler, valid for shape >= 1."""
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    while True:
        x = standard_normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = uniform01(state)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v
        if np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(v)):
            return d * v


@njit(cache=True, nogil=True)
def beta_sample(state, a, b):
    """Beta(a, b) draw as X/(X+Y) with two Gamma draws; requires a, b >= 1."""
    x = standard_gamma(state, a)
    y = standard_gamma(state, b)
    return x / (x + y)


class RandomStream:
    """A single deterministic random stream with a visible, copyable state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed_state(seed)

    @classmethod
    def from_key(cls, master_seed: int, *tokens: int | str) -> "RandomStream":
        """Stream keyed by (master_seed, tokens); same key, same sequence."""
        stream = cls.__new__(cls)
        stream.state = seed_state(derive_seed(master_seed, *tokens))
        return stream

    def uniform(self) -> float:
        return float(uniform01(self.state))

    def bernoulli(self, p: float) -> int:
        return 1 if uniform01(self.state) < p else 0

    def normal(self) -> float:
        return float(standard_normal(self.state))

    def beta(self, a: float, b: float) -> float:
        if a < 1.0 or b < 1.0:
            raise ValueError("beta_sample requires both shape parameters >= 1")
        return float(beta_sample(self.state, a, b))

    def copy(self) -> "RandomStream":
        stream = RandomStream.__new__(RandomStream)
        stream.state = self.state.copy()
        return stream
