import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def random_spinor(rng, dim):
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


def random_nonflat_lambda(rng, count):
    """Random lambda tuple with at least two distinct entries (no zeros)."""
    while True:
        lam = rng.uniform(-3, 3, size=count)
        if np.all(np.abs(lam) > 0.2) and np.ptp(lam) > 0.3:
            return tuple(float(v) for v in lam)
