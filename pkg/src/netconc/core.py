"""Domain types and the weight-only concentration measures.

Nodes are indexed ``0..n-1`` throughout. All types are immutable after
construction; array-valued fields are exposed as read-only numpy views.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional

import numpy as np

from .errors import InvalidGraph, InvalidWeights, NonGraphicalSequence

#: inputs whose sum misses 1 by more than this are rejected
WEIGHT_SUM_TOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Nonnegative node weights summing to one."""

    values: np.ndarray
    renormalized: bool = field(default=False, compare=False)

    def __init__(self, values: Iterable[float]):
        v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if v.ndim != 1:
            raise InvalidWeights("weights must be a one-dimensional sequence")
        if v.size < 2:
            raise InvalidWeights(f"need at least 2 weights, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidWeights("weights must be finite")
        neg = np.flatnonzero(v < 0)
        if neg.size:
            raise InvalidWeights(f"negative weight at position {int(neg[0])}: {v[neg[0]]!r}")
        total = float(v.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidWeights(f"weights sum to {total!r}, expected 1 (tolerance {WEIGHT_SUM_TOL})")
        renorm = total != 1.0
        if renorm:
            v = v / total
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "renormalized", renorm)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def permuted(self, perm) -> "WeightVector":
        """Weights relabelled so that node ``i`` becomes node ``perm[i]``."""
        out = np.empty_like(self.values)
        out[np.asarray(perm)] = self.values
        return WeightVector(out)


def _canonical_edge(i: int, j: int, n: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if i == j:
        raise InvalidGraph(f"self-loop at node {i}")
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidGraph(f"edge ({i}, {j}) out of range for n={n}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class BinaryGraph:
    """Simple undirected graph stored as a set of unordered node pairs."""

    n: int
    edges: frozenset

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(n)
        if n < 1:
            raise InvalidGraph("graph needs at least one node")
        canon = frozenset(_canonical_edge(i, j, n) for i, j in edges)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", canon)

    @classmethod
    def complete(cls, n: int) -> "BinaryGraph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "BinaryGraph":
        return cls(n)

    @classmethod
    def from_adjacency(cls, a) -> "BinaryGraph":
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidGraph("adjacency matrix must be square")
        if np.any(np.diag(a) != 0):
            raise InvalidGraph("adjacency matrix has nonzero diagonal")
        if not np.array_equal(a, a.T):
            raise InvalidGraph("adjacency matrix is not symmetric")
        if not np.all((a == 0) | (a == 1)):
            raise InvalidGraph("adjacency matrix entries must be 0 or 1")
        i, j = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], zip(i.tolist(), j.tolist()))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as a sorted ``(E, 2)`` integer array."""
        arr = np.array(sorted(self.edges), dtype=np.intp).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        e = self.edge_array
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        a.setflags(write=False)
        return a

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        d = np.zeros(self.n, dtype=int)
        e = self.edge_array
        np.add.at(d, e[:, 0], 1)
        np.add.at(d, e[:, 1], 1)
        return tuple(int(x) for x in d)

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self.edges

    def with_edge(self, i: int, j: int) -> "BinaryGraph":
        return BinaryGraph(self.n, self.edges | {_canonical_edge(i, j, self.n)})

    def permuted(self, perm) -> "BinaryGraph":
        perm = [int(p) for p in perm]
        return BinaryGraph(self.n, ((perm[i], perm[j]) for i, j in self.edges))

    def quadratic_form(self, w: WeightVector) -> float:
        """``w' A w``, i.e. twice the sum of weight products over edges."""
        e = self.edge_array
        v = w.values
        return 2.0 * float(np.dot(v[e[:, 0]], v[e[:, 1]]))

    def to_interaction(self) -> "InteractionMatrix":
        return InteractionMatrix(self.adjacency)


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Symmetric nonnegative interaction intensities with zero diagonal."""

    entries: np.ndarray

    def __init__(self, entries, *, atol: float = 1e-12):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidGraph("interaction matrix must be square")
        if not np.all(np.isfinite(m)):
            raise InvalidGraph("interaction matrix must be finite")
        if np.any(np.diag(m) != 0):
            raise InvalidGraph("interaction matrix must have a zero diagonal")
        if np.any(m < 0):
            raise InvalidGraph("interaction matrix must be nonnegative")
        if not np.allclose(m, m.T, rtol=0, atol=atol):
            raise InvalidGraph("interaction matrix is not symmetric")
        m = 0.5 * (m + m.T)
        object.__setattr__(self, "entries", _frozen(m))

    @classmethod
    def complete_benchmark(cls, n: int) -> "InteractionMatrix":
        """The matrix ``11' - I``."""
        return cls(np.ones((n, n)) - np.eye(n))

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def __eq__(self, other):
        if not isinstance(other, InteractionMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def scaled(self, c: float) -> "InteractionMatrix":
        return InteractionMatrix(c * self.entries)

    def support(self) -> BinaryGraph:
        """Graph of the strictly positive entries."""
        return BinaryGraph.from_adjacency((self.entries > 0).astype(int))

    def quadratic_form(self, w: WeightVector) -> float:
        v = w.values
        return float(v @ self.entries @ v)


def is_graphical(degrees) -> bool:
    """Erdős–Gallai test for a simple-graph degree sequence."""
    d = sorted((int(x) for x in degrees), reverse=True)
    n = len(d)
    if any(x < 0 for x in d) or sum(d) % 2:
        return False
    if n and d[0] > n - 1:
        return False
    lhs = 0
    for k in range(1, n + 1):
        lhs += d[k - 1]
        rhs = k * (k - 1) + sum(min(x, k) for x in d[k:])
        if lhs > rhs:
            return False
    return True


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    def __init__(self, degrees: Iterable[int]):
        d = tuple(int(x) for x in degrees)
        if not is_graphical(d):
            raise NonGraphicalSequence(f"degree sequence {d} is not graphical")
        object.__setattr__(self, "degrees", d)

    @classmethod
    def of(cls, g: BinaryGraph) -> "DegreeSequence":
        return cls(g.degrees)

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self):
        return iter(self.degrees)


@dataclass(frozen=True)
class IndexReport:
    """Weight-only measures and the index family for one (weights, network) pair."""

    hhi: float
    gini: float
    density: float
    psi: float
    psi_dens: Optional[float] = None
    psi_null: Optional[float] = None
    z_null: Optional[float] = None
    psi_deg: Optional[float] = None
    psi_weighted: Optional[float] = None
    psi_transformed: Optional[float] = None
    psi_multilayer: Optional[float] = None

    FIELDS = (
        "hhi", "gini", "density", "psi", "psi_dens", "psi_null", "z_null",
        "psi_deg", "psi_weighted", "psi_transformed", "psi_multilayer",
    )

    def as_dict(self) -> dict:
        return asdict(self)


def hhi(w: WeightVector) -> float:
    """Herfindahl–Hirschman index, the sum of squared shares."""
    v = w.values
    return float(np.dot(v, v))


def gini(w: WeightVector) -> float:
    """Gini coefficient as relative mean absolute difference.

    ``sum_ij |w_i - w_j| / (2 N sum(w))`` with no small-sample correction,
    so the maximum is ``1 - 1/N``.
    """
    v = np.sort(w.values)
    n = v.size
    # sum_{i<j} (v_j - v_i) for sorted v, counted twice over ordered pairs
    ranks = 2 * np.arange(1, n + 1) - n - 1
    total = 2.0 * float(np.dot(ranks, v))
    return total / (2.0 * n * float(v.sum()))


def density(g: BinaryGraph) -> float:
    """Fraction of node pairs that are linked."""
    if g.n < 2:
        raise InvalidGraph("density needs at least two nodes")
    return 2.0 * g.num_edges / (g.n * (g.n - 1))
