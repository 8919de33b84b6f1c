import numpy as np
import pytest

from particleness.system import SystemSpec


@pytest.fixture
def qutrit_spec():
    return SystemSpec.default(3)


@pytest.fixture
def qubit_spec():
    return SystemSpec.default(2)


def rand_density(rng, d, rank=None):
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def ket(i, d=3):
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v
