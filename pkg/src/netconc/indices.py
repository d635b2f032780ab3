"""The network concentration index family.

Every member is a ratio ``w' M w / benchmark``. The baseline-normalized
members (baseline, weighted, transformed-data, multi-layer) share the
benchmark ``w' (11' - I) w = 1 - HHI``; the density-adjusted and null-model
members rescale it, and the degree-constrained member lives in
:mod:`netconc.degree_solver`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import (
    BinaryGraph,
    IndexReport,
    InteractionMatrix,
    WeightVector,
    density,
    gini,
    hhi,
)
from .errors import DegenerateBenchmark, EmptyGraph, InvalidProbability, LayerMismatch, NetConcError
from .rng import stream

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class LayerWeights:
    alphas: tuple[float, ...]

    def __init__(self, alphas: Sequence[float]):
        a = tuple(float(x) for x in alphas)
        if not a:
            raise NetConcError("need at least one layer weight")
        if any(x < 0 or not math.isfinite(x) for x in a):
            raise NetConcError(f"layer weights must be finite and nonnegative: {a}")
        if abs(sum(a) - 1.0) > 1e-9:
            raise NetConcError(f"layer weights sum to {sum(a)!r}, expected 1")
        object.__setattr__(self, "alphas", a)

    def __len__(self):
        return len(self.alphas)


TRANSFORM_KINDS = ("square", "absolute", "exceedance", "sqrt")


@dataclass(frozen=True)
class Transformation:
    """Elementwise map applied to raw signals before network construction.

    ``sqrt`` acts on magnitudes with the sign kept, so it is defined for
    returns of either sign.
    """

    kind: str
    threshold: Optional[float] = None

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise NetConcError(f"unknown transformation {self.kind!r}; choose from {TRANSFORM_KINDS}")
        if self.kind == "exceedance":
            if self.threshold is None or not math.isfinite(self.threshold):
                raise NetConcError("exceedance transformation needs a finite threshold")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "square":
            return x * x
        if self.kind == "absolute":
            return np.abs(x)
        if self.kind == "sqrt":
            return np.sign(x) * np.sqrt(np.abs(x))
        return (x > self.threshold).astype(float)

    @classmethod
    def parse(cls, text: str) -> "Transformation":
        """Parse ``square``, ``absolute``, ``sqrt`` or ``exceedance:<tau>``."""
        kind, _, arg = text.partition(":")
        if kind == "exceedance":
            try:
                return cls("exceedance", float(arg))
            except ValueError:
                raise NetConcError(f"bad exceedance threshold in {text!r}") from None
        return cls(kind)


def complete_benchmark(w: WeightVector) -> float:
    """``w' (11' - I) w``, which equals ``1 - HHI`` on the simplex."""
    return 1.0 - hhi(w)


def _baseline_denominator(w: WeightVector) -> float:
    den = complete_benchmark(w)
    if den <= DEGENERATE_TOL:
        raise DegenerateBenchmark(
            "1 - HHI is zero: all weight sits on one node, no pairwise interaction exists"
        )
    return den


def psi_general(w: WeightVector, m: InteractionMatrix, b: InteractionMatrix) -> float:
    """Generic member ``w' M w / w' B w`` of the family."""
    if m.n != w.n or b.n != w.n:
        raise LayerMismatch(f"weights have {w.n} nodes, matrices {m.n} and {b.n}")
    den = b.quadratic_form(w)
    if den <= DEGENERATE_TOL:
        raise DegenerateBenchmark(f"benchmark quadratic form is {den!r}")
    return m.quadratic_form(w) / den


def _check_size(w: WeightVector, g) -> None:
    if g.n != w.n:
        raise LayerMismatch(f"weights have {w.n} nodes but network has {g.n}")


def nci_baseline(w: WeightVector, g: BinaryGraph) -> float:
    """Share of potential weighted interconnection realized on the links of ``g``."""
    _check_size(w, g)
    return g.quadratic_form(w) / _baseline_denominator(w)


def nci_density_adjusted(w: WeightVector, g: BinaryGraph) -> float:
    """Baseline index divided by network density (assortative-connectivity ratio)."""
    _check_size(w, g)
    dens = density(g)
    if dens == 0:
        raise EmptyGraph("density-adjusted index undefined on a graph without edges")
    return g.quadratic_form(w) / (_baseline_denominator(w) * dens)


def assortative_ratio(w: WeightVector, g: BinaryGraph) -> float:
    """Mean ``w_i w_j`` over linked ordered pairs over its mean over all ordered pairs.

    Computed directly from the pair lists, independently of the index
    formulas, so it can cross-check them.
    """
    _check_size(w, g)
    if g.num_edges == 0:
        raise EmptyGraph("no linked pairs")
    v = w.values
    n = w.n
    linked = [v[i] * v[j] for i, j in g.edges]
    all_pairs = [v[i] * v[j] for i in range(n) for j in range(i + 1, n)]
    return (sum(linked) / len(linked)) / (sum(all_pairs) / len(all_pairs))


def er_null_moments(w: WeightVector, p: float) -> tuple[float, float]:
    """Mean and variance of ``w' A w`` when each pair links independently with probability ``p``."""
    if not (0.0 < p < 1.0):
        raise InvalidProbability(f"link probability must lie in (0, 1), got {p!r}")
    v = w.values
    iu = np.triu_indices(w.n, 1)
    pair = 2.0 * v[iu[0]] * v[iu[1]]
    mean = p * float(pair.sum())
    var = p * (1.0 - p) * float(np.dot(pair, pair))
    return mean, var


class NullModelResult(NamedTuple):
    psi_null: float
    z: Optional[float]
    expected: float
    variance: float


NULL_MODELS = ("er", "gnm", "configuration")


def nci_null_model(
    w: WeightVector,
    g: BinaryGraph,
    p: Optional[float] = None,
    *,
    model: str = "er",
    reps: int = 2000,
    seed: int = 0,
) -> NullModelResult:
    """Observed interaction relative to its expectation under a random-graph model.

    ``model="er"`` uses the closed-form Erdős–Rényi moments with link
    probability ``p``. ``"gnm"`` (same edge count, placed uniformly) and
    ``"configuration"`` (degree-preserving rewiring of ``g``) estimate the
    moments from ``reps`` seeded samples; ``p`` is ignored for them.
    The Z-score is ``None`` when the null variance is zero.
    """
    _check_size(w, g)
    observed = g.quadratic_form(w)
    if model == "er":
        if p is None:
            raise InvalidProbability("the Erdős–Rényi null model needs a link probability")
        mean, var = er_null_moments(w, p)
    elif model in ("gnm", "configuration"):
        if reps < 2:
            raise NetConcError("Monte Carlo null model needs reps >= 2")
        samples = _null_samples(w, g, model, reps, seed)
        mean = float(samples.mean())
        var = float(samples.var(ddof=1))
    else:
        raise NetConcError(f"unknown null model {model!r}; choose from {NULL_MODELS}")
    if mean <= DEGENERATE_TOL:
        raise DegenerateBenchmark(f"null-model expectation is {mean!r}")
    z = (observed - mean) / math.sqrt(var) if var > 0 else None
    return NullModelResult(observed / mean, z, mean, var)


def _null_samples(w: WeightVector, g: BinaryGraph, model: str, reps: int, seed: int) -> np.ndarray:
    # local import: degree_solver imports this module
    from .degree_solver import degree_preserving_shuffle
    from .netgen import gnm_random

    out = np.empty(reps)
    for k in range(reps):
        rng = stream(seed, "null", model, k)
        if model == "gnm":
            sample = gnm_random(g.n, g.num_edges, rng)
        else:
            sample = degree_preserving_shuffle(g, 10 * max(g.num_edges, 1), rng)
        out[k] = sample.quadratic_form(w)
    return out


def nci_weighted(w: WeightVector, m: InteractionMatrix) -> float:
    """Baseline-normalized index on an intensity matrix."""
    _check_size(w, m)
    return m.quadratic_form(w) / _baseline_denominator(w)


def nci_transformed(w: WeightVector, g_transformed) -> float:
    """Baseline-normalized index on a network built from transformed data.

    ``g_transformed`` is either the binary graph built from the transformed
    signals or a matrix of transformed link intensities.
    """
    if isinstance(g_transformed, InteractionMatrix):
        return nci_weighted(w, g_transformed)
    return nci_baseline(w, g_transformed)


def layer_indices(w: WeightVector, layers: Sequence[BinaryGraph]) -> list[float]:
    return [nci_baseline(w, g) for g in layers]


def nci_multilayer(w: WeightVector, layers: Sequence[BinaryGraph], alphas: LayerWeights) -> float:
    """Index on the layer aggregate ``sum_l alpha_l A_l``, evaluated directly."""
    if not isinstance(alphas, LayerWeights):
        alphas = LayerWeights(alphas)
    if len(layers) != len(alphas):
        raise LayerMismatch(f"{len(layers)} layers but {len(alphas)} layer weights")
    if not layers:
        raise LayerMismatch("no layers given")
    for g in layers:
        _check_size(w, g)
    agg = np.zeros((w.n, w.n))
    for a, g in zip(alphas.alphas, layers):
        agg += a * g.adjacency
    v = w.values
    return float(v @ agg @ v) / _baseline_denominator(w)


def index_report(
    w: WeightVector,
    g: BinaryGraph,
    *,
    p: Optional[float] = None,
    intensities: Optional[InteractionMatrix] = None,
    transformed=None,
    layers: Optional[Sequence[BinaryGraph]] = None,
    alphas: Optional[Sequence[float]] = None,
    deg_mode: Optional[str] = None,
) -> IndexReport:
    """Compute every requested variant for one (weights, network) pair.

    The baseline measures are always present; each optional argument
    switches on the corresponding variant. The density-adjusted index is
    left as ``None`` on an empty graph.
    """
    _check_size(w, g)
    fields = dict(hhi=hhi(w), gini=gini(w), density=density(g), psi=nci_baseline(w, g))
    if g.num_edges:
        fields["psi_dens"] = nci_density_adjusted(w, g)
    if p is not None:
        res = nci_null_model(w, g, p)
        fields["psi_null"] = res.psi_null
        fields["z_null"] = res.z
    if deg_mode is not None:
        from .degree_solver import nci_degree_constrained

        fields["psi_deg"] = nci_degree_constrained(w, g, deg_mode)
    if intensities is not None:
        fields["psi_weighted"] = nci_weighted(w, intensities)
    if transformed is not None:
        fields["psi_transformed"] = nci_transformed(w, transformed)
    if layers is not None:
        fields["psi_multilayer"] = nci_multilayer(w, layers, LayerWeights(alphas))
    return IndexReport(**fields)
