import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netconc.core import density, hhi
from netconc.errors import InvalidProbability, NetConcError, UnsupportedSize
from netconc.netgen import (
    CORE,
    LOW_WEIGHT_NODES,
    SCENARIO_DENSITY,
    ScenarioSpec,
    erdos_renyi,
    gnm_random,
    peripheral_edge_ranking,
    reference_weights,
    sample_simplex_uniform,
    scenario_core_periphery,
    scenario_peripheral,
)
from netconc.rng import stream


def test_reference_weights():
    w = reference_weights()
    assert w.n == 10 and w.values.sum() == pytest.approx(1.0)
    assert hhi(w) == pytest.approx(0.1758)


def test_core_periphery_structure():
    g = scenario_core_periphery()
    assert g.num_edges == 12
    assert density(g) == pytest.approx(12 / 45)
    assert g.has_edge(0, 1) and not g.has_edge(0, 4)
    assert g.has_edge(4, 6) and g.has_edge(7, 9) and not g.has_edge(6, 7)


def test_peripheral_structure():
    g = scenario_peripheral()
    assert g.num_edges == 12
    assert all(g.degrees[i] <= 1 for i in CORE)
    assert all(i in LOW_WEIGHT_NODES and j in LOW_WEIGHT_NODES for i, j in g.edges)
    assert sorted(g.edges) == sorted(peripheral_edge_ranking()[:12])


def test_peripheral_ranking_is_by_product():
    v = reference_weights().values
    prods = [v[i] * v[j] for i, j in peripheral_edge_ranking()]
    assert prods == sorted(prods)
    assert len(prods) == 15


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_randomized_scenarios(seed):
    a = scenario_core_periphery(seed=seed)
    assert a.num_edges == 12
    assert all(a.has_edge(i, j) for i in CORE for j in CORE if i < j)
    assert a == scenario_core_periphery(seed=seed)
    b = scenario_peripheral(seed=seed)
    assert b.num_edges == 12 and all(b.degrees[i] == 0 for i in CORE)


def test_scenarios_need_ten_nodes():
    with pytest.raises(UnsupportedSize):
        scenario_core_periphery(12)
    with pytest.raises(UnsupportedSize):
        scenario_peripheral(8)


def test_scenario_spec():
    assert ScenarioSpec("core_periphery").generate() == scenario_core_periphery()
    assert ScenarioSpec("er_random", p=0.3, seed=4).generate() == erdos_renyi(10, 0.3, 4)
    with pytest.raises(InvalidProbability):
        ScenarioSpec("er_random", p=1.0)
    with pytest.raises(NetConcError):
        ScenarioSpec("star")


def test_er_determinism_and_bounds():
    assert erdos_renyi(10, 0.3, 5) == erdos_renyi(10, 0.3, 5)
    assert erdos_renyi(10, 0.3, 5) != erdos_renyi(10, 0.3, 6)
    for p in (0.0, 1.0, -0.5):
        with pytest.raises(InvalidProbability):
            erdos_renyi(10, p, 0)


def test_er_mean_density():
    p, reps = SCENARIO_DENSITY, 2000
    dens = np.array([density(erdos_renyi(10, p, stream(1, "er-density", k))) for k in range(reps)])
    se = math.sqrt(p * (1 - p) / 45 / reps)
    assert abs(dens.mean() - p) < 4 * se


@given(st.integers(2, 12), st.data(), st.integers(0, 2**32 - 1))
def test_gnm_edge_count(n, data, seed):
    m = data.draw(st.integers(0, n * (n - 1) // 2))
    assert gnm_random(n, m, seed).num_edges == m


def test_simplex_samples_are_valid():
    for k in range(50):
        w = sample_simplex_uniform(7, stream(2, "simplex", k))
        assert w.n == 7 and np.all(w.values >= 0)
        assert w.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_simplex_moments():
    """Dirichlet(1,...,1): each share has mean 1/N and E[HHI] = 2 / (N + 1)."""
    n, reps = 10, 4000
    draws = np.array([sample_simplex_uniform(n, stream(3, "simplex-moments", k)).values for k in range(reps)])
    mean_se = math.sqrt((n - 1) / (n * n * (n + 1)) / reps)
    assert np.all(np.abs(draws.mean(axis=0) - 1 / n) < 4.5 * mean_se)
    h = (draws ** 2).sum(axis=1)
    assert abs(h.mean() - 2 / (n + 1)) < 4 * h.std(ddof=1) / math.sqrt(reps)
