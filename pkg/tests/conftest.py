import functools

import numpy as np
import pytest

from randwave.spectral import Observable, SpectralWindow, enumerate_block, project


@functools.lru_cache(maxsize=None)
def cos_block(k: int, n: int = 2, solver: str = "jacobi"):
    """Projected ``cos x_1`` on the window [k, k+1); cached across tests."""
    obs = Observable.cosine(n)
    return project(obs, enumerate_block(SpectralWindow.unit(k), n), solver)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def mc_within(mean: float, se: float, expected: float, k: float = 4.0) -> bool:
    return abs(mean - expected) <= k * se


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
