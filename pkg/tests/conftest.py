import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def superop_function(m, func):
    """Apply a scalar function to a Hermitian superoperator matrix via eigh."""
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return v @ np.diag(func(w)) @ v.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)
