"""``netconc`` command line: compute, simulate, validate-er, sweep, mst, rolling."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from . import io
from .core import IndexReport, InteractionMatrix, density, gini, hhi
from .degree_solver import DEFAULT_NODE_LIMIT, METHODS, nci_degree_constrained
from .errors import DegenerateBenchmark, InsufficientData, NetConcError
from .indices import (
    NULL_MODELS,
    LayerWeights,
    Transformation,
    nci_baseline,
    nci_density_adjusted,
    nci_multilayer,
    nci_null_model,
    nci_transformed,
    nci_weighted,
)
from .mc import (
    DEFAULT_P_GRID,
    VARIANTS,
    experiment_fixed_weights,
    experiment_joint,
    rolling_nci,
    summarize,
    theta_sweep,
    validate_er_benchmark,
    variant_correlations,
)
from .netbuild import (
    ReturnPanel,
    apply_transformation,
    correlation_mst,
    drop_missing,
    log_returns,
    symmetrize,
)
from .netgen import reference_weights
from .rng import SEED_ENV, default_seed

log = logging.getLogger("netconc")


class _Warn:
    """Collects convention warnings so they go to stderr once each."""

    def __init__(self):
        self.seen = []

    def __call__(self, msg: str) -> None:
        if msg not in self.seen:
            self.seen.append(msg)
            print(f"warning: {msg}", file=sys.stderr)


def _degenerate_zero(fn, warn, name):
    try:
        return fn()
    except DegenerateBenchmark as exc:
        warn(f"{name}: {exc}; reported as 0 by convention")
        return 0.0


def _load_weights(path, warn):
    labels, w = io.read_weights(path)
    if w.renormalized:
        warn(f"weights in {path} did not sum exactly to 1 and were renormalized")
    return labels, w


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _theta_grid(text: str) -> list[float]:
    """``a,b,c`` or ``log:lo:hi:k`` (k points, log-spaced, lo > 0)."""
    if text.startswith("log:"):
        try:
            _, lo, hi, k = text.split(":")
            lo, hi, k = float(lo), float(hi), int(k)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected log:lo:hi:k, got {text!r}") from None
        if not (0 < lo < hi) or k < 2:
            raise argparse.ArgumentTypeError("log grid needs 0 < lo < hi and k >= 2")
        return np.geomspace(lo, hi, k).tolist()
    return _float_list(text)


def _transformation(text: str) -> Transformation:
    try:
        return Transformation.parse(text)
    except NetConcError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _write_report(target, report: IndexReport, fmt: str) -> None:
    row = report.as_dict()
    if fmt == "jsonl":
        io.write_jsonl(target, [row])
    else:
        io.write_table(target, list(IndexReport.FIELDS), [[row[k] for k in IndexReport.FIELDS]])


# -- subcommands ---------------------------------------------------------------------------


def cmd_compute(args, warn) -> int:
    labels, w = _load_weights(args.weights, warn)
    net = io.read_edge_list(args.network, labels)
    intens = net if isinstance(net, InteractionMatrix) else None
    g = net.support() if intens is not None else net

    fields = dict(hhi=hhi(w), gini=gini(w), density=density(g))
    fields["psi"] = _degenerate_zero(lambda: nci_baseline(w, g), warn, "psi")
    if g.num_edges:
        fields["psi_dens"] = _degenerate_zero(lambda: nci_density_adjusted(w, g), warn, "psi_dens")
    else:
        warn("network has no edges; psi_dens left empty")
    if args.null_model != "er" or args.p is not None:
        try:
            res = nci_null_model(w, g, args.p, model=args.null_model, reps=args.null_reps, seed=args.seed)
            fields["psi_null"], fields["z_null"] = res.psi_null, res.z
        except DegenerateBenchmark as exc:
            warn(f"psi_null: {exc}; reported as 0 by convention")
            fields["psi_null"] = 0.0
    if args.deg_mode != "none":
        fields["psi_deg"] = _degenerate_zero(
            lambda: nci_degree_constrained(w, g, args.deg_mode, node_limit=args.exact_node_limit), warn, "psi_deg")
    if intens is not None:
        fields["psi_weighted"] = _degenerate_zero(lambda: nci_weighted(w, intens), warn, "psi_weighted")
    if args.transformed is not None:
        t = io.read_edge_list(args.transformed, labels)
        fields["psi_transformed"] = _degenerate_zero(lambda: nci_transformed(w, t), warn, "psi_transformed")
    if args.layer:
        if len(args.layer) != len(args.alpha):
            raise NetConcError(f"{len(args.layer)} --layer flags but {len(args.alpha)} --alpha flags")
        alphas = LayerWeights(args.alpha)
        layers = []
        for path in args.layer:
            lay = io.read_edge_list(path, labels)
            layers.append(lay.support() if isinstance(lay, InteractionMatrix) else lay)
        fields["psi_multilayer"] = _degenerate_zero(
            lambda: nci_multilayer(w, layers, alphas), warn, "psi_multilayer")
    _write_report(args.out, IndexReport(**fields), args.format)
    return 0


def _record_rows(records):
    for rec in records:
        row = rec.report.as_dict() if rec.report is not None else {}
        yield [rec.scenario, rec.index, rec.seed, rec.failed, rec.hhi] + [row.get(v) for v in VARIANTS] + [
            rec.error or ""]


def cmd_simulate(args, warn) -> int:
    run = experiment_fixed_weights if args.experiment == "fixed" else experiment_joint
    r = args.r if args.r is not None else (5000 if args.experiment == "fixed" else 800)
    records = run(r, args.seed, threads=args.threads)
    io.write_table(args.out, ["scenario", "replication", "seed", "failed", "hhi", *VARIANTS, "error"],
                   _record_rows(records))
    if args.summary:
        rows = summarize(records)
        header = ["scenario", "variant", "n", "failed", "mean", "sd", "q05", "q25", "q50", "q75", "q95"]
        io.write_table(args.summary, header, ([row.get(k) for k in header] for row in rows))
    if args.correlations:
        c = variant_correlations(records)
        io.write_table(args.correlations, ["variant", *VARIANTS],
                       ([v, *c[i].tolist()] for i, v in enumerate(VARIANTS)))
    failed = sum(rec.failed for rec in records)
    if failed:
        warn(f"{failed} of {len(records)} replications failed and were excluded")
    return 0


def cmd_validate_er(args, warn) -> int:
    w = reference_weights()
    if args.weights:
        _, w = _load_weights(args.weights, warn)
    rows = validate_er_benchmark(args.p_grid, args.r, args.seed, w=w, threads=args.threads)
    io.write_table(args.out, ["p", "mean_psi", "se", "deviation", "within_3se"],
                   ([row.p, row.mean_psi, row.se, row.deviation, row.within_3se] for row in rows))
    bad = [row.p for row in rows if not row.within_3se]
    if bad:
        print(f"error: |mean psi - p| >= 3 SE at p = {', '.join(io.fmt(p) for p in bad)}", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args, warn) -> int:
    labels, w = _load_weights(args.weights, warn)
    mlabels, a = io.read_matrix(args.matrix)
    a = io.align_columns(mlabels, a, labels, what="matrix")
    m = symmetrize(a)
    rows = theta_sweep(m, w, args.thetas)
    io.write_table(args.out, ["theta", "nci", "hhi", "gini", "edges"],
                   ([row.theta, row.nci, row.hhi, row.gini, row.edges] for row in rows))
    return 0


def _load_panel(args, labels) -> ReturnPanel:
    dates, plabels, values = io.read_panel(args.returns)
    values = io.align_columns(plabels, values, labels)
    values, dates = drop_missing(values, dates)
    if args.prices:
        panel = log_returns(values, labels, dates)
    else:
        panel = ReturnPanel(values, labels, dates)
    if args.transformation is not None:
        panel = apply_transformation(panel, args.transformation)
    return panel


def cmd_mst(args, warn) -> int:
    labels, w = _load_weights(args.weights, warn)
    panel = _load_panel(args, labels)
    tree = correlation_mst(panel)
    if args.edges_out:
        io.write_edge_list(args.edges_out, tree, labels)
    fields = dict(hhi=hhi(w), gini=gini(w), density=density(tree),
                  psi=_degenerate_zero(lambda: nci_baseline(w, tree), warn, "psi"))
    fields["psi_dens"] = _degenerate_zero(lambda: nci_density_adjusted(w, tree), warn, "psi_dens")
    _write_report(args.out, IndexReport(**fields), args.format)
    return 0


def cmd_rolling(args, warn) -> int:
    labels, w = _load_weights(args.weights, warn)
    panel = _load_panel(args, labels)
    if args.window > panel.t:
        raise InsufficientData(f"window {args.window} exceeds the {panel.t} available observations")
    res = rolling_nci(panel, w, args.window, args.step, args.b, seed=args.seed,
                      level=args.level, threads=args.threads)
    io.write_table(args.out, ["window_start", "window_end", "nci", "ci_low", "ci_high", "hhi", "gini", "flagged"],
                   ([r.window_start, r.window_end, r.nci, r.ci_low, r.ci_high, r.hhi, r.gini, r.flagged]
                    for r in res))
    flagged = sum(r.flagged for r in res)
    if flagged:
        warn(f"{flagged} window(s) have a bootstrap interval excluding the point estimate")
    return 0


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netconc", description="Network concentration indices on weighted networks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threads=False, seed=False):
        sp.add_argument("--out", default="-", help="output CSV path (default stdout)")
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help=f"random seed (default: ${SEED_ENV}, else a fixed built-in seed)")
        if threads:
            sp.add_argument("--threads", type=_positive_int, default=1,
                            help="worker threads; results do not depend on it")

    c = sub.add_parser("compute", help="index report for one weights file and one network")
    c.add_argument("--weights", required=True)
    c.add_argument("--network", required=True, help="edge list; an intensity column enables psi_weighted")
    c.add_argument("--transformed", help="edge list built from transformed data")
    c.add_argument("--layer", action="append", default=[], help="layer edge list (repeat with --alpha)")
    c.add_argument("--alpha", action="append", type=float, default=[], help="layer weight (repeat)")
    c.add_argument("--p", type=float, help="link probability for the Erdős–Rényi null model")
    c.add_argument("--null-model", choices=NULL_MODELS, default="er")
    c.add_argument("--null-reps", type=_positive_int, default=2000)
    c.add_argument("--deg-mode", choices=(*METHODS, "none"), default="greedy+rewire")
    c.add_argument("--exact-node-limit", type=_positive_int, default=DEFAULT_NODE_LIMIT,
                   help="largest network the exact degree solver will enumerate")
    c.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    common(c, seed=True)
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("simulate", help="Monte Carlo experiment over the three network mechanisms")
    s.add_argument("--experiment", choices=("fixed", "joint"), required=True)
    s.add_argument("--r", type=_positive_int, help="replications per mechanism (default 5000 fixed, 800 joint)")
    s.add_argument("--summary", help="per-mechanism summary CSV")
    s.add_argument("--correlations", help="pooled variant correlation matrix CSV")
    common(s, threads=True, seed=True)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate-er", help="check E[psi] = p on random graphs over a grid of p")
    v.add_argument("--p-grid", type=_float_list, default=list(DEFAULT_P_GRID))
    v.add_argument("--r", type=_positive_int, default=5000)
    v.add_argument("--weights", help="weights file (default: the ten-node reference weights)")
    common(v, threads=True, seed=True)
    v.set_defaults(func=cmd_validate_er)

    w = sub.add_parser("sweep", help="index over a grid of thresholds on a coefficient matrix")
    w.add_argument("--matrix", required=True)
    w.add_argument("--weights", required=True)
    w.add_argument("--thetas", type=_theta_grid, required=True, help="a,b,c or log:lo:hi:k")
    common(w)
    w.set_defaults(func=cmd_sweep)

    for name, helptext, func in (
        ("mst", "index on the correlation minimum spanning tree", cmd_mst),
        ("rolling", "rolling-window index with bootstrap intervals", cmd_rolling),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--returns", required=True, help="date-indexed panel CSV")
        sp.add_argument("--weights", required=True)
        sp.add_argument("--prices", action="store_true", help="panel holds prices; convert to log returns")
        sp.add_argument("--transformation", type=_transformation,
                        help="square, absolute, sqrt or exceedance:<tau>")
        if name == "mst":
            sp.add_argument("--edges-out", help="write the tree as an edge list")
            sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
            common(sp)
        else:
            sp.add_argument("--window", type=_positive_int, default=252)
            sp.add_argument("--step", type=_positive_int, default=63)
            sp.add_argument("--b", type=_positive_int, default=500, help="bootstrap resamples")
            sp.add_argument("--level", type=float, default=0.95)
            common(sp, threads=True, seed=True)
        sp.set_defaults(func=func)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if hasattr(args, "seed") and args.seed is None:
        args.seed = default_seed()
    warn = _Warn()
    try:
        return args.func(args, warn)
    except (NetConcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
