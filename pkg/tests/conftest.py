import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dichoricc.operator_model import HamiltonianSystem

settings.register_profile("dichoricc", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dichoricc")


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_psd(rng, n, rank=None):
    G = random_complex(rng, n, n if rank is None else rank) / np.sqrt(2 * n)
    return G @ G.conj().T


@pytest.fixture
def scalar113():
    return HamiltonianSystem([[1.0]], [[1.0]], [[3.0]])


@pytest.fixture
def T_pm2():
    """``[[1, 1], [3, -1]]``: squares to ``4 I``, eigenvalues ``+-2``."""
    return np.array([[1.0, 1.0], [3.0, -1.0]])
