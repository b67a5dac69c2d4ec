import numpy as np
import pytest

from groupsync import builtin_profiles


@pytest.fixture(scope="session")
def group1():
    return builtin_profiles()[0]


@pytest.fixture(scope="session")
def group2():
    return builtin_profiles()[1]


def random_trajectory(rng, n=None, n_steps=None, max_step=0.5):
    """Smooth random phase trajectory honoring the sub-pi step invariant."""
    n = n or rng.integers(2, 6)
    n_steps = n_steps or rng.integers(2, 201)
    start = rng.uniform(-np.pi, np.pi, size=(n, 1))
    steps = rng.uniform(-max_step, max_step, size=(n, n_steps))
    return start + np.cumsum(steps, axis=1)
