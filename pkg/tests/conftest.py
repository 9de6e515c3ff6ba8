import numpy as np
import pytest

from cctomo.io import MHZ
from cctomo.linalg import rho_from_params
from cctomo.model import SystemSpec


def random_density(rng, dim):
    """Random full-rank density matrix via the triangular parametrization."""
    return rho_from_params(rng.normal(size=dim * dim))


def random_pure(rng, dim):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_confusion(rng, dim, strength=0.06):
    """Well-conditioned column-stochastic matrix: identity plus leakage."""
    noise = rng.uniform(0.0, 1.0, size=(dim, dim))
    noise /= noise.sum(axis=0, keepdims=True)
    return (1.0 - strength) * np.eye(dim) + strength * noise


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def coupled_pair():
    """Two qubits at the reference operating point."""
    return SystemSpec(n_qubits=2, coupling={(1, 2): -4.37 * MHZ})


@pytest.fixture
def pi2_template():
    return {
        "shape": "rectangular",
        "angles": (np.pi / 2, np.pi / 2),
        "durations": (50e-9, 50e-9),
    }
