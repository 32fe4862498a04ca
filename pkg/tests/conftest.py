import numpy as np
import pytest

from cfjsac import scenario
from cfjsac.scenario import Scenario, ScenarioConfig


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hermitian(rng, n):
    A = crandn(rng, n, n)
    return A + A.conj().T


def random_feasible_pair(rng, n, caps=(1.0, 1.0)):
    """Beamformer blocks with uniformly random direction and power in [0, cap]."""
    out = []
    for cap in caps:
        v = crandn(rng, n)
        out.append(v / np.linalg.norm(v) * np.sqrt(cap * rng.uniform()))
    return out


def make_scenario(h1, h2, g1, g2, **cfg) -> Scenario:
    n = len(h1)
    return Scenario(np.asarray(h1, complex), np.asarray(h2, complex),
                    np.asarray(g1, complex), np.asarray(g2, complex),
                    ScenarioConfig(n_antennas=n, **cfg))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def default_scenario():
    return scenario.generate(ScenarioConfig(n_antennas=3, seed=42, alpha=0.5))
