import numpy as np
import pytest

from kinfluid import Moments


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def random_moments(rng, shape=(), dim=1, rho=(0.1, 2.0), u=(-1.1, 1.1),
                   T=(0.35, 1.0)):
    """A valid random state inside the well-resolved velocity envelope."""
    kw = dict(rho=rng.uniform(*rho, shape),
              u1=rng.uniform(*u, shape),
              T=rng.uniform(*T, shape))
    if dim == 2:
        kw["u2"] = rng.uniform(*u, shape)
    return Moments(**kw)
