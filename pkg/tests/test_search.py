import math

import numpy as np
import pytest

import pmdkit.search as search
from pmdkit.codespace import bloch_state
from pmdkit.pmd_metrics import epsilon_of, theorem1_bound
from pmdkit.search import SearchConfig, TheoremViolation, bloch_grid_oracle, optimize_epsilon, restart_seed

INV_SQRT3 = 1 / math.sqrt(3)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(n=1, k=0, restarts=0)
    with pytest.raises(ValueError):
        SearchConfig(n=1, k=0, step_decay=1.0)
    with pytest.raises(ValueError):
        SearchConfig(n=1, k=2)


def test_full_space_immediate():
    res = optimize_epsilon(SearchConfig(n=1, k=1, restarts=3))
    assert res.report.epsilon == pytest.approx(1.0, abs=1e-12)
    assert res.report.bound_theorem1 == 1.0
    assert res.trajectory[0] == (0, res.trajectory[0][1])


def test_single_qubit_reaches_bound():
    res = optimize_epsilon(SearchConfig(n=1, k=0, restarts=8, local_steps=500, seed=0))
    assert abs(res.report.epsilon - INV_SQRT3) <= 1e-4
    assert res.report.slack >= -1e-9


def test_two_qubit_slack_nonnegative():
    res = optimize_epsilon(SearchConfig(n=2, k=1, restarts=3, local_steps=150, seed=1))
    assert res.report.bound_theorem1 == pytest.approx(math.sqrt(7 / 15), abs=1e-15)
    assert res.report.slack >= -1e-9


def test_deterministic_and_worker_independent():
    cfg = SearchConfig(n=1, k=0, p=3, restarts=4, local_steps=80, seed=42)
    a = optimize_epsilon(cfg)
    b = optimize_epsilon(cfg, workers=3)
    assert a.to_dict() == b.to_dict()
    assert np.array_equal(a.best.basis, b.best.basis)


def test_trajectory_non_increasing():
    res = optimize_epsilon(SearchConfig(n=2, k=0, restarts=3, local_steps=100, seed=5))
    eps = [e for _, e in res.trajectory]
    its = [i for i, _ in res.trajectory]
    assert all(a > b for a, b in zip(eps, eps[1:]))
    assert its == sorted(its)
    assert res.report.epsilon == eps[-1]
    assert all(e >= res.report.bound_theorem1 - 1e-9 for e in eps)
    assert res.trajectory_csv().splitlines()[0] == "iteration,epsilon"


def test_target_stops_early():
    res = optimize_epsilon(SearchConfig(n=1, k=0, restarts=1, local_steps=2000, target=0.7))
    assert res.report.epsilon <= 0.7 + 1e-6
    assert res.trajectory[-1][0] < 2000


def test_restart_seeds_distinct():
    seeds = {restart_seed(7, i) for i in range(100)}
    assert len(seeds) == 100
    assert restart_seed(7, 3) == restart_seed(7, 3)


def test_violation_raises(monkeypatch):
    monkeypatch.setattr(search, "theorem1_bound", lambda n, lam, q: 2.0)
    with pytest.raises(TheoremViolation):
        optimize_epsilon(SearchConfig(n=1, k=0, restarts=1, local_steps=5))


# -- brute-force Bloch-sphere oracle -----------------------------------------


def test_grid_coarse():
    eps, _ = bloch_grid_oracle(2)
    assert eps <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        bloch_grid_oracle(1)


def test_grid_resolution_200():
    eps, (theta, phi) = bloch_grid_oracle(200)
    # eps = max(|x|, |y|, |z|) is 1-Lipschitz in the Bloch vector, and some grid
    # point lies within half a cell (in arc length) of the optimum
    half_cell = math.hypot(math.pi / 199 / 2, math.sqrt(2 / 3) * math.pi / 200)
    assert INV_SQRT3 <= eps <= INV_SQRT3 + half_cell
    bloch = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    assert np.allclose(np.abs(bloch), INV_SQRT3, atol=0.02)


def test_grid_agrees_with_epsilon_of():
    res = 40
    theta = np.linspace(0, math.pi, res)
    phi = np.linspace(0, 2 * math.pi, res, endpoint=False)
    best = min(epsilon_of(bloch_state(t, p))[0] for t in theta for p in phi)
    assert bloch_grid_oracle(res)[0] == pytest.approx(best, abs=1e-12)


def test_grid_octahedral_symmetry():
    # quarter turns about z permute (x, y) up to sign: eps(theta, phi) = eps(theta, phi + pi/2)
    res = 48
    theta = np.linspace(0, math.pi, res)
    phi = np.linspace(0, 2 * math.pi, res, endpoint=False)
    rng = np.random.default_rng(1)
    for _ in range(25):
        t = theta[rng.integers(res)]
        j = int(rng.integers(res))
        a = epsilon_of(bloch_state(t, phi[j]))[0]
        b = epsilon_of(bloch_state(t, phi[(j + res // 4) % res]))[0]
        c = epsilon_of(bloch_state(math.pi - t, phi[j]))[0]  # z -> -z
        assert a == pytest.approx(b, abs=1e-12) and a == pytest.approx(c, abs=1e-12)


def test_grid_never_beats_bound():
    assert bloch_grid_oracle(97)[0] >= theorem1_bound(1, 1, 2) - 1e-12
