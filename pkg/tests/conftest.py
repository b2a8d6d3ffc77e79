import numpy as np
import pytest

from labordyn import HOLLING, LV, ModelParams


@pytest.fixture
def defaults():
    return ModelParams()


@pytest.fixture
def holling_defaults():
    return ModelParams(response1=HOLLING, response2=HOLLING)


@pytest.fixture
def decoupled():
    """Both couplings off: u grows as e^{a t}, v and w decay linearly."""
    return ModelParams(a=1.0, b=1.0, c=1.0, alpha1=0.0, alpha2=0.0, w_dag=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_lv_params(rng):
    """A valid LV/LV parameter draw away from the resonance alpha1*c = alpha2*a."""
    while True:
        p = ModelParams(
            a=rng.uniform(0.2, 3.0), b=rng.uniform(0.2, 3.0), c=rng.uniform(1.0, 20.0),
            alpha1=rng.uniform(0.05, 2.0), alpha2=rng.uniform(0.05, 2.0),
            k1=rng.uniform(0.0, 0.2), w_dag=rng.uniform(0.0, 0.1),
            u0=rng.uniform(0.5, 2.0), v0=rng.uniform(0.5, 2.0), w0=rng.uniform(0.5, 2.0),
            response1=LV, response2=LV,
        )
        d = p.alpha1 * p.c - p.alpha2 * p.a
        if abs(d) > 0.05 * p.alpha1 * p.c:
            return p
