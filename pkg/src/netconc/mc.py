"""Monte Carlo experiments, the Erdős–Rényi validation grid, threshold sweeps and rolling windows.

Every replication draws from its own keyed stream (see :mod:`netconc.rng`),
so results are a pure function of the parameters and the seed, whatever
the number of worker threads.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import BinaryGraph, IndexReport, InteractionMatrix, WeightVector, gini, hhi
from .errors import InsufficientData, NetConcError, ZeroVariance
from .indices import Transformation, index_report, nci_baseline
from .netbuild import ReturnPanel, correlation_mst, threshold_graph
from .netgen import (
    SCENARIO_DENSITY,
    SCENARIO_N,
    ScenarioSpec,
    reference_weights,
    sample_simplex_uniform,
)
from .rng import stream

log = logging.getLogger(__name__)

MECHANISMS = ("core_periphery", "er_random", "peripheral")
VARIANTS = ("psi", "psi_dens", "psi_null", "psi_deg", "psi_weighted", "psi_transformed", "psi_multilayer")
MAX_DISCARD_FRACTION = 0.01
DEFAULT_P_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass(frozen=True)
class VariantConfig:
    """How the auxiliary structures behind each variant are built in simulation.

    Every link of the drawn graph gets an intensity ``U(intensity_low,
    intensity_high)`` for the weighted index; the default range has mean
    0.7, in line with weighted-to-binary ratios of about 0.69 across the
    deterministic scenarios. The transformed-data network carries the
    transformed intensities ``transform(gamma)`` on the same links. The
    multi-layer index mixes the drawn graph with its strong-tie layer (links
    whose intensity exceeds ``strong_tie``, by default the midpoint of the
    intensity range) using weights ``alphas``. The null model is
    Erdős–Rényi with link probability ``null_p``.
    """

    null_p: float = SCENARIO_DENSITY
    intensity_low: float = 0.4
    intensity_high: float = 1.0
    transform: str = "sqrt"
    strong_tie: Optional[float] = None
    alphas: tuple = (0.6, 0.4)
    deg_mode: str = "greedy+rewire"


@dataclass(frozen=True)
class ReplicationRecord:
    seed: int
    scenario: str
    index: int
    hhi: float
    report: Optional[IndexReport]
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.report is None


@dataclass(frozen=True)
class RollingResult:
    window_start: object
    window_end: object
    nci: float
    ci_low: float
    ci_high: float
    hhi: float
    gini: float
    n_boot: int = 0
    #: True when the percentile interval excludes the point estimate
    flagged: bool = False


def run_tasks(fn: Callable, items: Iterable, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def simulated_report(w: WeightVector, g: BinaryGraph, rng: np.random.Generator,
                     config: VariantConfig = VariantConfig()) -> IndexReport:
    """All seven variants for one simulated (weights, graph) draw."""
    e = g.edge_array
    gamma = rng.uniform(config.intensity_low, config.intensity_high, size=len(e))
    m = np.zeros((g.n, g.n))
    m[e[:, 0], e[:, 1]] = gamma
    m[e[:, 1], e[:, 0]] = gamma
    intens = InteractionMatrix(m)
    transformed = InteractionMatrix(Transformation(config.transform)(m))
    cut = config.strong_tie
    if cut is None:
        cut = 0.5 * (config.intensity_low + config.intensity_high)
    strong = BinaryGraph(g.n, map(tuple, e[gamma > cut].tolist()))
    return index_report(
        w, g,
        p=config.null_p,
        intensities=intens,
        transformed=transformed,
        layers=[g, strong],
        alphas=config.alphas,
        deg_mode=config.deg_mode,
    )


def _replicate(seed, scenario, k, w, draw, config) -> ReplicationRecord:
    try:
        report = simulated_report(w, draw, stream(seed, "variants", scenario, k), config)
    except (NetConcError, FloatingPointError) as exc:
        return ReplicationRecord(seed, scenario, k, hhi(w), None, f"{type(exc).__name__}: {exc}")
    return ReplicationRecord(seed, scenario, k, hhi(w), report)


def _mechanism_spec(kind: str) -> ScenarioSpec:
    return ScenarioSpec(kind, SCENARIO_N, p=SCENARIO_DENSITY if kind == "er_random" else None)


def _check_discards(records: Sequence[ReplicationRecord]) -> None:
    failed = sum(r.failed for r in records)
    if not records:
        return
    frac = failed / len(records)
    if failed:
        log.warning("%d of %d replications discarded (%.3g%%)", failed, len(records), 100 * frac)
    if frac > MAX_DISCARD_FRACTION:
        raise NetConcError(f"{failed} of {len(records)} replications failed; aborting")


def experiment_fixed_weights(r: int = 5000, seed: int = 0, *, threads: int = 1,
                             config: VariantConfig = VariantConfig(),
                             mechanisms: Sequence[str] = MECHANISMS) -> list[ReplicationRecord]:
    """Reference weights held fixed; ``r`` random graphs per mechanism.

    The core-periphery class keeps its core and rewires the six peripheral
    links; the peripheral class places its twelve links at random among
    the low-weight nodes; the random class is G(10, 12/45).
    """
    if r < 1:
        raise NetConcError("need r >= 1")
    w = reference_weights()

    def task(key):
        kind, k = key
        g = _mechanism_spec(kind).generate(stream(seed, "exp1", kind, k))
        return _replicate(seed, kind, k, w, g, config)

    records = run_tasks(task, [(m, k) for m in mechanisms for k in range(r)], threads)
    _check_discards(records)
    return records


def experiment_joint(r: int = 800, seed: int = 0, *, threads: int = 1,
                     config: VariantConfig = VariantConfig(),
                     mechanisms: Sequence[str] = MECHANISMS) -> list[ReplicationRecord]:
    """Weights and graphs both random; draw ``k`` shares one simplex-uniform weight vector across mechanisms."""
    if r < 1:
        raise NetConcError("need r >= 1")
    weights = [sample_simplex_uniform(SCENARIO_N, stream(seed, "exp2", "weights", k)) for k in range(r)]

    def task(key):
        kind, k = key
        g = _mechanism_spec(kind).generate(stream(seed, "exp2", kind, k))
        return _replicate(seed, kind, k, weights[k], g, config)

    records = run_tasks(task, [(m, k) for m in mechanisms for k in range(r)], threads)
    _check_discards(records)
    return records


def summarize(records: Sequence[ReplicationRecord], quantiles=(0.05, 0.25, 0.5, 0.75, 0.95)) -> list[dict]:
    """Mean, sd and quantiles of every variant, per mechanism, in first-seen mechanism order."""
    rows = []
    mechs = list(dict.fromkeys(r.scenario for r in records))
    for mech in mechs:
        group = [r for r in records if r.scenario == mech]
        ok = [r for r in group if not r.failed]
        for var in ("hhi",) + VARIANTS + ("z_null",):
            vals = np.array([getattr(r.report, var) for r in ok
                             if getattr(r.report, var) is not None], dtype=float)
            row = {"scenario": mech, "variant": var, "n": int(vals.size), "failed": len(group) - len(ok)}
            if vals.size:
                row["mean"] = float(vals.mean())
                row["sd"] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
                for q, x in zip(quantiles, np.quantile(vals, quantiles)):
                    row[f"q{int(round(100 * q)):02d}"] = float(x)
            rows.append(row)
    return rows


def variant_correlations(records: Sequence[ReplicationRecord], variants=VARIANTS) -> np.ndarray:
    """Pearson correlation matrix of the variants, pooled over mechanisms (listwise complete rows)."""
    data = []
    for r in records:
        if r.failed:
            continue
        row = [getattr(r.report, v) for v in variants]
        if any(x is None for x in row):
            continue
        data.append(row)
    if len(data) < 3:
        raise InsufficientData("need at least 3 complete replications for correlations")
    return np.corrcoef(np.array(data, dtype=float), rowvar=False)


@dataclass(frozen=True)
class ERGridRow:
    p: float
    mean_psi: float
    se: float
    deviation: float
    r: int

    @property
    def within_3se(self) -> bool:
        return abs(self.deviation) < 3 * self.se if self.se > 0 else self.deviation == 0


def validate_er_benchmark(p_grid: Sequence[float] = DEFAULT_P_GRID, r: int = 5000, seed: int = 0, *,
                          w: Optional[WeightVector] = None, threads: int = 1) -> list[ERGridRow]:
    """Mean baseline index over ``r`` G(n, p) draws at each grid point, against ``p``.

    The draws at grid point ``k`` come from one stream keyed by ``k``; row
    ``j`` of the uniform block is exactly what ``erdos_renyi(n, p, rng)``
    would consume on its ``j``-th call.
    """
    if r < 1:
        raise NetConcError("need r >= 1")
    w = w or reference_weights()
    for p in p_grid:
        if not (0.0 < p < 1.0):
            raise NetConcError(f"grid probability {p!r} outside (0, 1)")
    n = w.n
    iu, ju = np.triu_indices(n, 1)
    v = w.values
    pair = 2.0 * v[iu] * v[ju]
    den = 1.0 - hhi(w)

    def task(item):
        k, p = item
        rng = stream(seed, "er-grid", k)
        links = rng.random((r, iu.size)) < p
        psi = (links @ pair) / den
        mean = float(psi.mean())
        se = float(psi.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
        return ERGridRow(float(p), mean, se, mean - float(p), r)

    return run_tasks(task, list(enumerate(p_grid)), threads)


@dataclass(frozen=True)
class SweepRow:
    theta: float
    nci: float
    hhi: float
    gini: float
    edges: int


def theta_sweep(m: InteractionMatrix, w: WeightVector, thetas: Sequence[float]) -> list[SweepRow]:
    """Baseline index of the thresholded network at each ``theta`` (ascending)."""
    thetas = [float(t) for t in thetas]
    if any(b < a for a, b in zip(thetas, thetas[1:])):
        raise NetConcError("thetas must be sorted ascending")
    h, gi = hhi(w), gini(w)
    rows = []
    for t in thetas:
        g = threshold_graph(m, t)
        rows.append(SweepRow(t, nci_baseline(w, g), h, gi, g.num_edges))
    return rows


def window_starts(t: int, window: int, step: int) -> list[int]:
    if window < 3:
        raise NetConcError("window must be at least 3 observations")
    if step < 1:
        raise NetConcError("step must be positive")
    if t < window:
        raise InsufficientData(f"window of {window} observations exceeds the {t} available")
    return list(range(0, t - window + 1, step))


def bootstrap_nci(x: np.ndarray, w: WeightVector, b: int, rng: np.random.Generator) -> np.ndarray:
    """NCI of the correlation MST for ``b`` row resamples of ``x`` (failed resamples dropped)."""
    t = x.shape[0]
    out = []
    for _ in range(b):
        idx = rng.integers(0, t, size=t)
        try:
            out.append(nci_baseline(w, correlation_mst(x[idx])))
        except ZeroVariance:
            continue
    return np.array(out)


def rolling_nci(panel: ReturnPanel, w: WeightVector, window: int = 252, step: int = 63, b: int = 500,
                seed: int = 0, *, level: float = 0.95, threads: int = 1) -> list[RollingResult]:
    """Correlation-MST NCI on rolling windows with percentile bootstrap bands.

    Rows are resampled i.i.d. with replacement inside each window, which
    ignores serial dependence.
    """
    if panel.n != w.n:
        raise NetConcError(f"panel has {panel.n} assets but weights have {w.n}")
    if b < 1:
        raise NetConcError("need b >= 1 bootstrap resamples")
    starts = window_starts(panel.t, window, step)
    h, gi = hhi(w), gini(w)
    lo_q, hi_q = (1 - level) / 2, 1 - (1 - level) / 2

    def task(item):
        k, s = item
        x = panel.returns[s : s + window]
        point = nci_baseline(w, correlation_mst(x))
        boots = bootstrap_nci(x, w, b, stream(seed, "rolling", window, k))
        if boots.size == 0:
            raise InsufficientData(f"all bootstrap resamples failed in window {k}")
        if (b - boots.size) / b > MAX_DISCARD_FRACTION:
            raise NetConcError(f"{b - boots.size} of {b} resamples failed in window {k}")
        lo, hi = np.quantile(boots, [lo_q, hi_q])
        return RollingResult(
            panel.timestamps[s], panel.timestamps[s + window - 1], point,
            float(lo), float(hi), h, gi, int(boots.size), bool(point < lo or point > hi),
        )

    return run_tasks(task, list(enumerate(starts)), threads)
