"""Seeded generators: the three ten-node scenarios, Erdős–Rényi graphs, and simplex weights.

Node labels in the scenario descriptions run 1..10; here they are 0..9.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .core import BinaryGraph, WeightVector
from .errors import InvalidProbability, NetConcError, UnsupportedSize
from .rng import as_generator

REFERENCE_WEIGHTS = (0.30, 0.20, 0.15, 0.10, 0.08, 0.06, 0.04, 0.03, 0.02, 0.02)
SCENARIO_N = 10
SCENARIO_EDGES = 12
#: density shared by the three scenarios, 12 / 45
SCENARIO_DENSITY = SCENARIO_EDGES / 45

CORE = (0, 1, 2, 3)
CLUSTERS = ((4, 5, 6), (7, 8, 9))
LOW_WEIGHT_NODES = tuple(range(4, 10))
SCENARIO_KINDS = ("core_periphery", "peripheral", "er_random")


def reference_weights() -> WeightVector:
    return WeightVector(REFERENCE_WEIGHTS)


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    n: int = SCENARIO_N
    p: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise NetConcError(f"unknown scenario {self.kind!r}; choose from {SCENARIO_KINDS}")
        if self.n < 2:
            raise NetConcError("scenario needs n >= 2")
        if self.kind == "er_random":
            if self.p is None or not (0.0 < self.p < 1.0):
                raise InvalidProbability(f"er_random needs p in (0, 1), got {self.p!r}")

    def generate(self, rng=None) -> BinaryGraph:
        """Draw a graph; ``rng`` overrides ``seed`` when given."""
        src = rng if rng is not None else self.seed
        if self.kind == "core_periphery":
            return scenario_core_periphery(self.n, src)
        if self.kind == "peripheral":
            return scenario_peripheral(self.n, src)
        if src is None:
            raise NetConcError("er_random needs a seed")
        return erdos_renyi(self.n, self.p, src)


def _require_ten(n: int) -> None:
    if n != SCENARIO_N:
        raise UnsupportedSize(f"the deterministic scenarios are defined for n={SCENARIO_N}, got {n}")


def _random_edges_among(nodes, k, rng) -> list:
    pairs = list(combinations(nodes, 2))
    idx = rng.choice(len(pairs), size=k, replace=False)
    return [pairs[i] for i in sorted(idx.tolist())]


def scenario_core_periphery(n: int = SCENARIO_N, seed=None) -> BinaryGraph:
    """Clique on the four heaviest nodes plus two isolated peripheral triangles.

    With ``seed`` given, the core is kept and the six peripheral edges are
    instead placed uniformly at random among pairs of nodes 4..9.
    """
    _require_ten(n)
    edges = list(combinations(CORE, 2))
    if seed is None:
        for cluster in CLUSTERS:
            edges += combinations(cluster, 2)
    else:
        edges += _random_edges_among(LOW_WEIGHT_NODES, 6, as_generator(seed))
    return BinaryGraph(n, edges)


def peripheral_edge_ranking(w: Optional[WeightVector] = None) -> list:
    """Pairs among nodes 4..9 from lowest to highest weight product, ties lexicographic."""
    v = (w or reference_weights()).values
    pairs = combinations(LOW_WEIGHT_NODES, 2)
    return sorted(pairs, key=lambda ij: (v[ij[0]] * v[ij[1]], ij))


def scenario_peripheral(n: int = SCENARIO_N, seed=None) -> BinaryGraph:
    """Twelve links confined to the six low-weight nodes; the heavy nodes stay isolated.

    Without ``seed`` the twelve lowest-product pairs (under the reference
    weights) are taken; with ``seed`` twelve of the fifteen pairs are drawn
    uniformly.
    """
    _require_ten(n)
    if seed is None:
        edges = peripheral_edge_ranking()[:SCENARIO_EDGES]
    else:
        edges = _random_edges_among(LOW_WEIGHT_NODES, SCENARIO_EDGES, as_generator(seed))
    return BinaryGraph(n, edges)


def erdos_renyi(n: int, p: float, seed) -> BinaryGraph:
    """G(n, p): every unordered pair linked independently with probability ``p``."""
    if not (0.0 < p < 1.0):
        raise InvalidProbability(f"link probability must lie in (0, 1), got {p!r}")
    rng = as_generator(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return BinaryGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def gnm_random(n: int, m: int, seed) -> BinaryGraph:
    """Uniform graph with exactly ``m`` edges."""
    total = n * (n - 1) // 2
    if not (0 <= m <= total):
        raise NetConcError(f"cannot place {m} edges on {n} nodes")
    rng = as_generator(seed)
    iu, ju = np.triu_indices(n, 1)
    idx = np.sort(rng.choice(total, size=m, replace=False))
    return BinaryGraph(n, zip(iu[idx].tolist(), ju[idx].tolist()))


def sample_simplex_uniform(n: int, seed) -> WeightVector:
    """Uniform draw from the simplex as gaps between sorted uniforms (Dirichlet(1, ..., 1))."""
    if n < 2:
        raise NetConcError("need n >= 2")
    rng = as_generator(seed)
    u = np.sort(rng.random(n - 1))
    cuts = np.concatenate(([0.0], u, [1.0]))
    return WeightVector(np.diff(cuts))
