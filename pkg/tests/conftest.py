import numpy as np
import pytest

import cfbandits as cf
from cfbandits import harness


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile every numba kernel once up front.

    Timed acceptance checks must measure computation, not JIT latency, and
    the disk cache makes this near-instant after the first session.
    """
    cfg = harness.preset(
        "scenario2", horizon=40, replications=1, policies=cf.POLICY_TAGS
    )
    harness.run_experiment(cfg)
    rng = cf.RandomStream(1)
    cf.sample_feedback(cf.ldp_scheme(1.0), np.zeros(4, dtype=np.int64), rng)
    cf.pull_many(cfg.model, 0, 4, rng)
    rng.beta(2.0, 3.0)
    rng.normal()
    cf.kl_upper_inverse(cf.KlBudget(0.5, 3, 1.0))
    cf.kl_lower_inverse(cf.KlBudget(0.5, 3, 1.0))
