import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cfjsac import linalg, scenario
from cfjsac.exceptions import ConfigError, DimensionError
from cfjsac.scenario import ScenarioConfig

from conftest import crandn, make_scenario


def test_generation_is_deterministic():
    cfg = ScenarioConfig(n_antennas=3, seed=42)
    a, b = scenario.generate(cfg), scenario.generate(cfg)
    for name in ("h1", "h2", "g1", "g2"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_different_seeds_differ():
    a = scenario.generate(ScenarioConfig(n_antennas=3, seed=42))
    b = scenario.generate(ScenarioConfig(n_antennas=3, seed=43))
    assert not np.allclose(a.h1, b.h1)


def test_stream_layout_matches_channel_order():
    cfg = ScenarioConfig(n_antennas=2, seed=7)
    s = scenario.generate(cfg)
    z = scenario.complex_gaussian_stream(7, 8)
    np.testing.assert_array_equal(np.concatenate([s.h1, s.h2, s.g1, s.g2]), z)


def test_stream_statistics():
    z = scenario.complex_gaussian_stream(0, 200_000)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.01)
    assert np.var(z.real) == pytest.approx(0.5, abs=0.01)
    assert np.var(z.imag) == pytest.approx(0.5, abs=0.01)
    assert abs(np.mean(z)) < 0.01
    assert abs(np.mean(z.real * z.imag)) < 0.01


def test_channel_power_monte_carlo():
    n = 3
    vals = [np.linalg.norm(scenario.generate(ScenarioConfig(n_antennas=n, seed=sd)).h1) ** 2 / n
            for sd in range(10_000)]
    assert np.mean(vals) == pytest.approx(1.0, abs=0.05)


def test_channels_are_read_only():
    s = scenario.generate(ScenarioConfig(n_antennas=2))
    with pytest.raises(ValueError):
        s.h1[0] = 0


@pytest.mark.parametrize("kwargs", [
    {"n_antennas": 0},
    {"n_antennas": 2.5},
    {"n_antennas": 2, "alpha": 1.5},
    {"n_antennas": 2, "alpha": -0.1},
    {"n_antennas": 2, "sigma1_sq": 0.0},
    {"n_antennas": 2, "sigma2_sq": -1.0},
    {"n_antennas": 2, "p1_max": 0.0},
    {"n_antennas": 2, "p2_max": float("inf")},
])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        ScenarioConfig(**kwargs)


def test_all_zero_channels_rejected():
    with pytest.raises(ConfigError):
        make_scenario((0, 0), (0, 0), (1, 0), (0, 1))
    with pytest.raises(ConfigError):
        make_scenario((1, 0), (0, 1), (0, 0), (0, 0))
    with pytest.raises(DimensionError):
        make_scenario((1, 0), (0, 1, 0), (1, 0), (0, 1))


def test_config_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_antennas": 4, "seed": 9, "alpha": 0.25, "p2_max": 2.0}))
    cfg = ScenarioConfig.from_json(path)
    assert cfg == ScenarioConfig(n_antennas=4, seed=9, alpha=0.25, p2_max=2.0)
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg
    path.write_text(json.dumps({"n_antennas": 4, "antennas": 3}))
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json(path)
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"seed": 1})


def test_channel_csv_round_trip(tmp_path):
    s = scenario.generate(ScenarioConfig(n_antennas=3, seed=5))
    path = tmp_path / "ch.csv"
    scenario.save_channels_csv(s, path)
    back = scenario.load_channels_csv(path, ScenarioConfig(n_antennas=1))
    assert back.n == 3
    for name in ("h1", "h2", "g1", "g2"):
        np.testing.assert_array_equal(getattr(back, name), getattr(s, name))
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        scenario.load_channels_csv(path, ScenarioConfig(n_antennas=1))


def test_stack_alpha_one():
    s = scenario.generate(ScenarioConfig(n_antennas=3, seed=1, alpha=1.0))
    p = scenario.stack(s)
    h = np.concatenate([s.h1, s.h2])
    np.testing.assert_allclose(p.M, np.outer(h, h.conj()), atol=1e-15)
    vals = linalg.eigh(p.M).values
    assert vals[0] == pytest.approx(np.linalg.norm(h) ** 2, rel=1e-12)
    assert np.all(np.abs(vals[1:]) <= 1e-12 * vals[0])


def test_stack_alpha_zero():
    s = scenario.generate(ScenarioConfig(n_antennas=3, seed=1, alpha=0.0))
    p = scenario.stack(s)
    g = np.concatenate([s.g1, s.g2])
    g2_sq = np.linalg.norm(s.g2) ** 2
    np.testing.assert_allclose(p.M, g2_sq * np.outer(g, g.conj()), atol=1e-14)


def test_stack_trace_identity_and_blocks():
    s = scenario.generate(ScenarioConfig(n_antennas=3, seed=11, alpha=0.5))
    p = scenario.stack(s)
    h, g = np.concatenate([s.h1, s.h2]), np.concatenate([s.g1, s.g2])
    expected = 0.5 * np.linalg.norm(h) ** 2 + 0.5 * np.linalg.norm(s.g2) ** 2 * np.linalg.norm(g) ** 2
    assert abs(np.trace(p.M).real - expected) <= 1e-12 * expected
    np.testing.assert_array_equal(p.B1 + p.B2, np.eye(6))
    np.testing.assert_array_equal(p.B1 @ p.B2, np.zeros((6, 6)))


def test_stack_with_noise_powers():
    s = scenario.generate(ScenarioConfig(n_antennas=2, seed=3, alpha=0.4, sigma1_sq=2.0, sigma2_sq=0.5))
    p = scenario.stack(s)
    h, g = np.concatenate([s.h1, s.h2]), np.concatenate([s.g1, s.g2])
    M = 0.4 / 2.0 * np.outer(h, h.conj()) + 0.6 * np.linalg.norm(s.g2) ** 2 / 0.5 * np.outer(g, g.conj())
    np.testing.assert_allclose(p.M, M, atol=1e-13)


def test_objective_matrix_value_examples():
    s = scenario.generate(ScenarioConfig(n_antennas=3, seed=2, alpha=1.0))
    p = scenario.stack(s)
    assert scenario.objective_matrix_value(p, np.zeros((6, 6))) == 0
    h = np.concatenate([s.h1, s.h2])
    val = scenario.objective_matrix_value(p, linalg.outer(h / np.linalg.norm(h)))
    assert val == pytest.approx(np.linalg.norm(h) ** 2, rel=1e-12)
    with pytest.raises(DimensionError):
        scenario.objective_matrix_value(p, np.eye(4))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.floats(0.0, 1.0))
def test_reformulation_identity(seed, n, alpha):
    s = scenario.generate(ScenarioConfig(n_antennas=n, seed=seed, alpha=alpha))
    p = scenario.stack(s)
    w = crandn(np.random.default_rng(seed), 2 * n)
    W = linalg.outer(w)
    direct = alpha * abs(np.vdot(w, p.h)) ** 2 + p.alpha_tilde * abs(np.vdot(w, p.g)) ** 2
    assert abs(scenario.objective_matrix_value(p, W) - direct) <= 1e-10 * max(direct, 1e-300)
    n1 = np.linalg.norm(w[:n]) ** 2
    n2 = np.linalg.norm(w[n:]) ** 2
    assert abs(linalg.trace_product(W, p.B1) - n1) <= 1e-12 * max(1.0, n1)
    assert abs(linalg.trace_product(W, p.B2) - n2) <= 1e-12 * max(1.0, n2)
    assert linalg.min_eig(p.M) >= -linalg.TAU_PSD * linalg.op_norm(p.M)
