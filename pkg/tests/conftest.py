import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_contraction(n, rng, smax=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    s = np.linalg.norm(A, 2)
    return A * (smax * rng.uniform(0.05, 1.0) / s)
