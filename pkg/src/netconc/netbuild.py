"""Building analysis networks from data.

Two routes: thresholding a symmetrized coefficient matrix, and the minimum
spanning tree of a correlation-distance matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BinaryGraph, InteractionMatrix
from .errors import (
    InsufficientData,
    NetConcError,
    NonFinite,
    NonPositivePrice,
    NonSquare,
    OutOfRange,
    ZeroVariance,
)
from .indices import Transformation


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Directed technical coefficients ``a[h, k]``; the diagonal is ignored."""

    a: np.ndarray
    labels: tuple

    def __init__(self, a, labels: Optional[Sequence[str]] = None):
        a = np.array(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonSquare(f"coefficient matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFinite("coefficient matrix has non-finite entries")
        off = ~np.eye(a.shape[0], dtype=bool)
        if np.any(a[off] < 0):
            raise NetConcError("coefficient matrix has negative entries")
        labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(a.shape[0]))
        if len(labels) != a.shape[0]:
            raise NetConcError(f"{len(labels)} labels for a {a.shape[0]}x{a.shape[0]} matrix")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """``T x N`` panel of returns (or any per-node signal) with row timestamps."""

    returns: np.ndarray
    labels: tuple
    timestamps: tuple

    def __init__(self, returns, labels=None, timestamps=None):
        r = np.array(returns, dtype=float)
        if r.ndim != 2:
            raise NetConcError("return panel must be two-dimensional")
        if r.shape[0] < 2:
            raise InsufficientData(f"need at least 2 observations, got {r.shape[0]}")
        if not np.all(np.isfinite(r)):
            raise NonFinite("return panel has missing or non-finite values")
        labels = tuple(labels) if labels is not None else tuple(f"x{i}" for i in range(r.shape[1]))
        timestamps = tuple(timestamps) if timestamps is not None else tuple(range(r.shape[0]))
        if len(labels) != r.shape[1] or len(timestamps) != r.shape[0]:
            raise NetConcError("labels/timestamps do not match the panel shape")
        r.setflags(write=False)
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "timestamps", timestamps)

    @property
    def t(self) -> int:
        return self.returns.shape[0]

    @property
    def n(self) -> int:
        return self.returns.shape[1]

    def rows(self, idx) -> "ReturnPanel":
        idx = np.asarray(idx)
        return ReturnPanel(self.returns[idx], self.labels, [self.timestamps[i] for i in idx.tolist()])


def symmetrize(c) -> InteractionMatrix:
    """Average a directed coefficient matrix with its transpose, zeroing the diagonal."""
    a = c.a if isinstance(c, CoefficientMatrix) else CoefficientMatrix(c).a
    s = 0.5 * (a + a.T)
    np.fill_diagonal(s, 0.0)
    return InteractionMatrix(s)


def threshold_graph(m: InteractionMatrix, theta: float) -> BinaryGraph:
    """Link every pair whose intensity is strictly above ``theta``."""
    if theta < 0:
        raise NetConcError(f"threshold must be nonnegative, got {theta!r}")
    iu, ju = np.triu_indices(m.n, 1)
    keep = m.entries[iu, ju] > theta
    return BinaryGraph(m.n, zip(iu[keep].tolist(), ju[keep].tolist()))


def drop_missing(prices, timestamps=None):
    """Remove rows containing any missing value; returns ``(prices, timestamps)``."""
    p = np.asarray(prices, dtype=float)
    keep = ~np.any(np.isnan(p), axis=1)
    ts = None if timestamps is None else [t for t, k in zip(timestamps, keep) if k]
    return p[keep], ts


def log_returns(prices, labels=None, timestamps=None) -> ReturnPanel:
    """One-period log price ratios; the first timestamp is consumed."""
    p = np.asarray(prices, dtype=float)
    if p.ndim != 2:
        raise NetConcError("prices must be a T x N array")
    if p.shape[0] < 2:
        raise InsufficientData(f"need at least 2 price rows, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise NonFinite("prices contain missing or non-finite values; drop them first")
    bad = np.argwhere(p <= 0)
    if bad.size:
        t, i = bad[0]
        raise NonPositivePrice(f"non-positive price {p[t, i]!r} at row {t}, column {i}")
    r = np.diff(np.log(p), axis=0)
    ts = None if timestamps is None else list(timestamps)[1:]
    return ReturnPanel(r, labels, ts)


def correlation_matrix(panel) -> np.ndarray:
    """Sample Pearson correlations between the panel's columns (unit diagonal)."""
    x = panel.returns if isinstance(panel, ReturnPanel) else np.asarray(panel, dtype=float)
    if x.shape[0] < 3:
        raise InsufficientData(f"correlation needs at least 3 observations, got {x.shape[0]}")
    xc = x - x.mean(axis=0)
    ss = np.sqrt(np.einsum("ij,ij->j", xc, xc))
    scale = np.maximum(np.abs(x).max(axis=0), 1.0)
    flat = np.flatnonzero(ss <= 1e-14 * scale * np.sqrt(x.shape[0]))
    if flat.size:
        raise ZeroVariance(f"column {int(flat[0])} has zero variance")
    z = xc / ss
    rho = z.T @ z
    rho = np.clip(0.5 * (rho + rho.T), -1.0, 1.0)
    np.fill_diagonal(rho, 1.0)
    return rho


def mantegna_distance(rho):
    """``sqrt(2 (1 - rho))``; works elementwise on arrays."""
    r = np.asarray(rho, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < -1.0 - 1e-12) or np.any(r > 1.0 + 1e-12):
        raise OutOfRange("correlation outside [-1, 1]")
    d = np.sqrt(2.0 * (1.0 - np.clip(r, -1.0, 1.0)))
    return float(d) if d.ndim == 0 else d


def mst(dist) -> BinaryGraph:
    """Minimum spanning tree by Prim's algorithm.

    Edges are totally ordered by ``(distance, i, j)`` with ``i < j``, so equal
    distances are resolved lexicographically and the result is deterministic.
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NonSquare("distance matrix must be square")
    n = d.shape[0]
    if n < 2:
        raise NetConcError("MST needs at least 2 nodes")
    off = ~np.eye(n, dtype=bool)
    if not np.all(np.isfinite(d[off])):
        raise NonFinite("distance matrix has non-finite entries")
    if not np.array_equal(d, d.T):
        raise NetConcError("distance matrix is not symmetric")

    nodes = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best_d = d[0].copy()
    best_u = np.zeros(n, dtype=np.intp)
    best_key = np.minimum(0, nodes) * n + np.maximum(0, nodes)
    edges = []
    for _ in range(n - 1):
        out = np.flatnonzero(~in_tree)
        order = np.lexsort((best_key[out], best_d[out]))
        v = int(out[order[0]])
        u = int(best_u[v])
        edges.append((u, v))
        in_tree[v] = True
        cand_d = d[v]
        cand_key = np.minimum(v, nodes) * n + np.maximum(v, nodes)
        better = ~in_tree & ((cand_d < best_d) | ((cand_d == best_d) & (cand_key < best_key)))
        best_d = np.where(better, cand_d, best_d)
        best_u = np.where(better, v, best_u)
        best_key = np.where(better, cand_key, best_key)
    return BinaryGraph(n, edges)


def correlation_mst(panel) -> BinaryGraph:
    """Correlation, Mantegna distance, then MST."""
    return mst(mantegna_distance(correlation_matrix(panel)))


def apply_transformation(panel: ReturnPanel, t: Transformation) -> ReturnPanel:
    return ReturnPanel(t(panel.returns), panel.labels, panel.timestamps)
