"""Bandit model construction and the reward/feedback sampling path."""

import numpy as np
import pytest

from cfbandits import RandomStream
from cfbandits.corruption import (
    NonInvertibleScheme,
    RandomizedResponseScheme,
    ldp_scheme,
)
from cfbandits.environment import CorruptBanditModel, pull, pull_many


def two_arm(mu0=0.9, mu1=0.6):
    schemes = (RandomizedResponseScheme(0.6, 0.6), RandomizedResponseScheme(0.9, 0.9))
    return CorruptBanditModel((mu0, mu1), schemes)


def test_model_validation():
    s = RandomizedResponseScheme(0.9, 0.9)
    with pytest.raises(ValueError):
        CorruptBanditModel((0.5,), (s,))  # needs at least two arms
    with pytest.raises(ValueError):
        CorruptBanditModel((0.5, 1.2), (s, s))
    with pytest.raises(ValueError):
        CorruptBanditModel((0.5, 0.4), (s,))  # scheme count mismatch
    with pytest.raises(TypeError):
        CorruptBanditModel((0.5, 0.4), (s, 0.9))


def test_model_means_are_read_only():
    m = two_arm()
    with pytest.raises(ValueError):
        m.means[0] = 0.0


def test_model_summary_fields():
    m = two_arm()
    assert m.n_arms == 2
    assert m.a_star == 0
    np.testing.assert_allclose(m.gaps(), [0.0, 0.3], rtol=0, atol=1e-15)
    # feedback means: 0.4 + 0.2 * 0.9 and 0.1 + 0.8 * 0.6
    np.testing.assert_allclose(m.feedback_means, [0.58, 0.58], atol=1e-12)


def test_a_star_prefers_first_maximum():
    m = CorruptBanditModel((0.7, 0.7, 0.3), [ldp_scheme(2.0)] * 3)
    assert m.a_star == 0
    assert m.gaps()[1] == 0.0


def test_feedback_means_match_mean_functions():
    m = two_arm()
    for a in range(m.n_arms):
        assert m.feedback_means[a] == m.functions[a](m.means[a])


def test_functions_raise_for_flat_scheme():
    m = CorruptBanditModel(
        (0.9, 0.6),
        (RandomizedResponseScheme(0.5, 0.5), RandomizedResponseScheme(0.9, 0.9)),
    )
    with pytest.raises(NonInvertibleScheme):
        m.functions


def test_pull_returns_binary_pair():
    m = two_arm()
    rng = RandomStream(1)
    seen = set()
    for _ in range(200):
        out = pull(m, 0, rng)
        assert out.reward in (0, 1) and out.feedback in (0, 1)
        seen.add((out.reward, out.feedback))
    assert len(seen) == 4  # scheme (0.6, 0.6) flips often enough to see all combos


def test_pull_deterministic_edges():
    s = RandomizedResponseScheme(1.0, 1.0)
    m = CorruptBanditModel((1.0, 0.0), (s, s))
    rng = RandomStream(4)
    for _ in range(20):
        assert pull(m, 0, rng) == (1, 1)
        assert pull(m, 1, rng) == (0, 0)


def test_pull_consumes_two_uniforms():
    m = two_arm()
    a = RandomStream(123)
    b = a.copy()
    pull(m, 1, a)
    b.uniform()
    b.uniform()
    assert a.uniform() == b.uniform()


def test_pull_arm_bounds():
    m = two_arm()
    rng = RandomStream(1)
    with pytest.raises(IndexError):
        pull(m, 2, rng)
    with pytest.raises(IndexError):
        pull(m, -1, rng)


def test_pull_many_matches_pull_loop():
    m = two_arm()
    rewards, feedbacks = pull_many(m, 0, 64, RandomStream(9))
    rng = RandomStream(9)
    expected = [pull(m, 0, rng) for _ in range(64)]
    assert rewards.tolist() == [e.reward for e in expected]
    assert feedbacks.tolist() == [e.feedback for e in expected]


def test_pull_many_long_run_frequencies():
    m = two_arm()
    rewards, feedbacks = pull_many(m, 0, 60_000, RandomStream(21))
    assert rewards.mean() == pytest.approx(0.9, abs=0.008)
    assert feedbacks.mean() == pytest.approx(0.58, abs=0.012)
    rewards, feedbacks = pull_many(m, 1, 60_000, RandomStream(22))
    assert rewards.mean() == pytest.approx(0.6, abs=0.012)
    assert feedbacks.mean() == pytest.approx(0.58, abs=0.012)
