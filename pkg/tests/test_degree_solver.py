from functools import lru_cache
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netconc.core import BinaryGraph, DegreeSequence, WeightVector, hhi
from netconc.degree_solver import (
    degree_benchmark,
    degree_preserving_shuffle,
    exact_max,
    greedy_max,
    havel_hakimi,
    nci_degree_constrained,
    rewire_refine,
    solve,
)
from netconc.errors import NonGraphicalSequence, TooLarge
from netconc.netgen import erdos_renyi, reference_weights, scenario_core_periphery, scenario_peripheral
from netconc.rng import stream

from .conftest import graphs, random_instance, weight_vectors, weights_from


@lru_cache(maxsize=None)
def realizations(n):
    """Degree sequence -> 0/1 matrix of every simple graph realizing it (rows over pairs)."""
    pairs = list(combinations(range(n), 2))
    ind = ((np.arange(1 << len(pairs))[:, None] >> np.arange(len(pairs))) & 1).astype(np.int8)
    deg = np.zeros((ind.shape[0], n), dtype=np.int64)
    for k, (i, j) in enumerate(pairs):
        deg[:, i] += ind[:, k]
        deg[:, j] += ind[:, k]
    code = deg @ (n ** np.arange(n))
    order = np.argsort(code, kind="stable")
    bounds = np.flatnonzero(np.diff(code[order])) + 1
    groups = {}
    for chunk in np.split(order, bounds):
        groups[tuple(deg[chunk[0]].tolist())] = ind[chunk]
    return pairs, groups


def oracle_max(w, d):
    """Maximum of w'Bw over all graphs with degree sequence d, by exhaustive enumeration."""
    pairs, groups = realizations(len(d))
    v = w.values
    prod = np.array([2 * v[i] * v[j] for i, j in pairs])
    return float((groups[tuple(d)] @ prod).max())


def is_realization(g, d):
    return tuple(g.degrees) == tuple(d)


# -- forced and trivial cases ----------------------------------------------------------------


def test_single_edge():
    w = WeightVector([0.7, 0.3])
    for mode in ("greedy", "greedy+rewire", "exact"):
        res = solve(w, (1, 1), mode)
        assert res.lam == pytest.approx(0.42)
        assert res.graph.edges == {(0, 1)}


@pytest.mark.parametrize("mode", ["greedy", "greedy+rewire", "exact"])
def test_complete_and_empty_sequences(mode):
    w = weights_from([5, 4, 3, 2, 1, 1])
    assert solve(w, (5,) * 6, mode).lam == pytest.approx(1 - hhi(w), abs=1e-15)
    res = solve(w, (0,) * 6, mode)
    assert res.lam == 0.0 and res.graph.num_edges == 0


def test_four_cycles():
    """2-regular graphs on four nodes are the three 4-cycles; the optimum is the best of them."""
    w = weights_from([0.4, 0.3, 0.2, 0.1])
    v = w.values
    cycles = [((0, 1), (1, 2), (2, 3), (0, 3)), ((0, 1), (1, 3), (2, 3), (0, 2)), ((0, 2), (1, 2), (1, 3), (0, 3))]
    best = max(BinaryGraph(4, c).quadratic_form(w) for c in cycles)
    assert len({BinaryGraph(4, c) for c in cycles}) == 3
    res = exact_max(w, (2, 2, 2, 2))
    assert res.lam == pytest.approx(best, abs=1e-15)
    assert res.is_certified_optimal
    assert greedy_max(w, (2, 2, 2, 2)).lam <= best + 1e-15
    assert best == pytest.approx(2 * (v[0] * v[1] + v[0] * v[2] + v[1] * v[3] + v[2] * v[3]))


def test_two_regular_six_nodes_against_enumeration():
    w = WeightVector([0.4, 0.3, 0.1, 0.1, 0.05, 0.05])
    d = (2,) * 6
    best = oracle_max(w, d)
    ex = exact_max(w, d)
    assert ex.lam == pytest.approx(best, abs=1e-14)
    gr = greedy_max(w, d)
    assert gr.lam <= best + 1e-14
    assert is_realization(gr.graph, d) and is_realization(ex.graph, d)
    again = rewire_refine(ex, w)
    assert again.lam == pytest.approx(ex.lam, abs=1e-15)


def test_non_graphical_rejected():
    with pytest.raises(NonGraphicalSequence):
        greedy_max(reference_weights(), (9,) + (0,) * 9)
    with pytest.raises(NonGraphicalSequence):
        greedy_max(WeightVector.uniform(3), (1, 1))


def test_exact_node_limit():
    w = reference_weights()
    d = DegreeSequence.of(scenario_core_periphery())
    with pytest.raises(TooLarge):
        exact_max(w, d)
    assert exact_max(w, d, node_limit=10).is_certified_optimal


def test_havel_hakimi_realizes():
    for d in [(3, 3, 2, 2, 1, 1), (1, 1, 1, 1), (4, 4, 4, 4, 4), (2, 2, 2)]:
        assert is_realization(havel_hakimi(d), d)


# -- properties against the enumeration oracle ----------------------------------------------


@given(st.integers(2, 6), st.data())
def test_all_routes_against_oracle(n, data):
    w = data.draw(weight_vectors(n=n))
    d = data.draw(graphs(n)).degrees
    best = oracle_max(w, d)
    ex = exact_max(w, d)
    assert ex.lam == pytest.approx(best, abs=1e-14)
    assert is_realization(ex.graph, d)
    for mode in ("greedy", "greedy+rewire"):
        res = solve(w, d, mode)
        assert is_realization(res.graph, d)
        assert res.lam == pytest.approx(res.graph.quadratic_form(w), abs=1e-12)
        assert res.lam <= best + 1e-12


@given(st.integers(4, 8), st.data())
def test_rewire_is_monotone(n, data):
    w = data.draw(weight_vectors(n=n))
    d = data.draw(graphs(n)).degrees
    start = greedy_max(w, d)
    res = rewire_refine(start, w)
    assert res.lam >= start.lam - 1e-15
    assert all(b >= a for a, b in zip(res.history, res.history[1:]))
    assert res.graph.degrees == start.graph.degrees


def test_rewire_fuzz_n8():
    for k in range(100):
        rng = stream(11, "rewire", k)
        w, g = random_instance(rng, 8)
        start = solve(w, g.degrees, "greedy")
        res = rewire_refine(start, w)
        assert res.lam >= start.lam
        assert res.graph.degrees == g.degrees


def test_rewire_max_iter_zero():
    w, g = random_instance(stream(3, "x"), 7)
    start = greedy_max(w, g.degrees)
    assert rewire_refine(start, w, max_iter=0) is start


def test_exact_beats_greedy_fuzz_n7():
    for k in range(200):
        w, g = random_instance(stream(21, "exact-vs-greedy", k), 7)
        assert exact_max(w, g.degrees).lam >= greedy_max(w, g.degrees).lam - 1e-15


# -- the index --------------------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["greedy", "greedy+rewire", "exact"])
def test_index_on_maximizer_is_one(mode):
    w, g = random_instance(stream(4, "maximizer"), 7, p=0.4)
    best = exact_max(w, g.degrees).graph
    assert nci_degree_constrained(w, best, "exact") == pytest.approx(1.0)
    assert nci_degree_constrained(w, BinaryGraph.complete(7), mode) == pytest.approx(1.0)


@given(st.integers(2, 7), st.data())
def test_index_in_unit_interval(n, data):
    w = data.draw(weight_vectors(n=n))
    g = data.draw(graphs(n))
    if g.num_edges == 0:
        return
    for mode in ("greedy", "greedy+rewire", "exact"):
        assert 0.0 <= nci_degree_constrained(w, g, mode) <= 1.0 + 1e-12


def test_benchmark_never_below_observed():
    w = reference_weights()
    for g in (scenario_core_periphery(), scenario_peripheral(), erdos_renyi(10, 0.3, 1)):
        lam, res = degree_benchmark(w, g, "greedy")
        assert lam >= g.quadratic_form(w)


def test_scenarios_on_the_reference_weights():
    w = reference_weights()
    for g in (scenario_core_periphery(), scenario_peripheral()):
        lam_exact = exact_max(w, g.degrees, node_limit=10).lam
        assert solve(w, g.degrees, "greedy+rewire").lam == pytest.approx(lam_exact, abs=1e-12)


# -- shuffling ---------------------------------------------------------------------------------


@given(st.integers(4, 10), st.data(), st.integers(0, 2**32 - 1))
def test_shuffle_preserves_degrees(n, data, seed):
    g = data.draw(graphs(n))
    out = degree_preserving_shuffle(g, 50, stream(seed, "shuffle"))
    assert out.degrees == g.degrees
    assert out.num_edges == g.num_edges
