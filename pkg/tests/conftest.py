import numpy as np
import pytest

from zassucc.fock import ClusterParams


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_params(n: int, rng: np.random.Generator, scale: float = 0.5) -> ClusterParams:
    mu_pair = {(i, j): float(rng.uniform(-scale, scale))
               for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    mu_single = {k: float(rng.uniform(-scale, scale)) for k in range(1, n + 1)}
    return ClusterParams(n=n, mu_pair=mu_pair, mu_single=mu_single)


def random_antisymmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return scale * (m - m.T)


@pytest.fixture
def rng():
    return make_rng(12345)
