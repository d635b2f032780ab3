"""CSV formats read and written by the command line.

weights      ``node,weight``; rows in any order, canonical node order is sorted labels
edge list    ``source,target[,intensity]``
matrix       dense square CSV, first row and first column hold the labels
panel        ``date,<asset>,<asset>,...``; ISO-8601 dates, empty cells are missing
"""
from __future__ import annotations

import csv
import io
import math
import sys
from contextlib import contextmanager
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import BinaryGraph, InteractionMatrix, WeightVector
from .errors import InvalidWeights, LabelMismatch, ParseError


def fmt(x) -> str:
    """Locale-independent number formatting with 6 significant digits."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if x == 0:
            return "0"
        return format(x, ".6g")
    return str(x)


def _float(text: str, path, line: int, what: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not a number", path, line) from None
    if not math.isfinite(x):
        raise ParseError(f"{what} {text!r} is not finite", path, line)
    return x


def _rows(path):
    """Yield ``(line_number, fields)`` for non-blank rows, header included."""
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            yield lineno, [c.strip() for c in row]


def _expect_header(path, rows, expected: Sequence[str], optional: Sequence[str] = ()):
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("file is empty", path) from None
    names = [h.lower() for h in header]
    allowed = [list(expected) + list(optional[:k]) for k in range(len(optional) + 1)]
    if names not in allowed:
        raise ParseError(f"expected header {','.join(expected)}, got {','.join(header)}", path, lineno)
    return names


def read_weights(path) -> tuple[list[str], WeightVector]:
    """Labels in canonical (sorted) order and the matching weight vector."""
    rows = _rows(path)
    _expect_header(path, rows, ("node", "weight"))
    found = {}
    for lineno, row in rows:
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", path, lineno)
        label, raw = row
        if not label:
            raise ParseError("empty node label", path, lineno)
        if label in found:
            raise ParseError(f"duplicate node {label!r}", path, lineno)
        x = _float(raw, path, lineno, "weight")
        if x < 0:
            raise ParseError(f"negative weight {raw} for node {label!r}", path, lineno)
        found[label] = x
    labels = sorted(found)
    try:
        w = WeightVector([found[k] for k in labels])
    except InvalidWeights as exc:
        raise ParseError(str(exc), path) from None
    return labels, w


def read_edge_list(path, labels: Sequence[str]):
    """Binary graph, or an :class:`InteractionMatrix` when an intensity column is present."""
    index = {lab: i for i, lab in enumerate(labels)}
    rows = _rows(path)
    header = _expect_header(path, rows, ("source", "target"), ("intensity",))
    weighted = len(header) == 3
    n = len(labels)
    edges = {}
    unknown = set()
    for lineno, row in rows:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        s, t = row[0], row[1]
        if s == t:
            raise ParseError(f"self-loop on node {s!r}", path, lineno)
        missing = [x for x in (s, t) if x not in index]
        if missing:
            unknown.update(missing)
            continue
        i, j = sorted((index[s], index[t]))
        val = 1.0
        if weighted:
            val = _float(row[2], path, lineno, "intensity")
            if val < 0:
                raise ParseError(f"negative intensity {row[2]}", path, lineno)
        if (i, j) in edges and edges[(i, j)] != val:
            raise ParseError(f"conflicting duplicate edge {s}-{t}", path, lineno)
        edges[(i, j)] = val
    if unknown:
        raise LabelMismatch(unknown)
    if not weighted:
        return BinaryGraph(n, edges)
    m = np.zeros((n, n))
    for (i, j), val in edges.items():
        m[i, j] = m[j, i] = val
    return InteractionMatrix(m)


def write_edge_list(path_or_buf, g, labels: Sequence[str]) -> None:
    """Write a graph or interaction matrix; zero-intensity pairs are omitted."""
    with _open_out(path_or_buf) as fh:
        out = csv.writer(fh, lineterminator="\n")
        if isinstance(g, InteractionMatrix):
            out.writerow(["source", "target", "intensity"])
            iu, ju = np.triu_indices(g.n, 1)
            for i, j in zip(iu.tolist(), ju.tolist()):
                val = g.entries[i, j]
                if val > 0:
                    out.writerow([labels[i], labels[j], repr(float(val))])
        else:
            out.writerow(["source", "target"])
            for i, j in sorted(g.edges):
                out.writerow([labels[i], labels[j]])


def read_matrix(path) -> tuple[list[str], np.ndarray]:
    rows = list(_rows(path))
    if not rows:
        raise ParseError("file is empty", path)
    _, header = rows[0]
    labels = header[1:]
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate column labels", path, rows[0][0])
    body = rows[1:]
    if len(body) != len(labels):
        raise ParseError(f"{len(labels)} column labels but {len(body)} data rows", path)
    a = np.empty((len(labels), len(labels)))
    for k, (lineno, row) in enumerate(body):
        if len(row) != len(labels) + 1:
            raise ParseError(f"expected {len(labels) + 1} fields, got {len(row)}", path, lineno)
        if row[0] != labels[k]:
            raise ParseError(f"row label {row[0]!r} does not match column label {labels[k]!r}", path, lineno)
        a[k] = [_float(x, path, lineno, "entry") for x in row[1:]]
    return labels, a


def read_panel(path) -> tuple[list[str], list[str], np.ndarray]:
    """``(dates, labels, values)`` with missing cells as NaN, rows in date order."""
    rows = _rows(path)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("file is empty", path) from None
    if not header or header[0].lower() != "date":
        raise ParseError("first column must be 'date'", path, lineno)
    labels = header[1:]
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate asset columns", path, lineno)
    dates, values = [], []
    for lineno, row in rows:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        try:
            date.fromisoformat(row[0])
        except ValueError:
            raise ParseError(f"bad ISO-8601 date {row[0]!r}", path, lineno) from None
        dates.append(row[0])
        values.append([math.nan if not c or c.upper() in ("NA", "NAN") else _float(c, path, lineno, "value")
                       for c in row[1:]])
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise ParseError("dates must be strictly increasing", path)
    return dates, labels, np.array(values, dtype=float).reshape(len(dates), len(labels))


def align_columns(labels: Sequence[str], values: np.ndarray, order: Sequence[str], what: str = "columns") -> np.ndarray:
    """Reorder columns of ``values`` (labelled ``labels``) to ``order``; sets must agree."""
    have, want = set(labels), set(order)
    if have != want:
        raise LabelMismatch(want - have, have - want)
    pos = {lab: i for i, lab in enumerate(labels)}
    idx = [pos[lab] for lab in order]
    if values.ndim == 2 and values.shape[0] == values.shape[1] == len(labels) and what == "matrix":
        return values[np.ix_(idx, idx)]
    return values[:, idx]


@contextmanager
def _open_out(target):
    if target is None or target == "-":
        yield sys.stdout
    elif isinstance(target, io.TextIOBase):
        yield target
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_table(target, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with _open_out(target) as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([fmt(x) for x in row])


def write_jsonl(target, rows: Iterable[dict]) -> None:
    import json

    with _open_out(target) as fh:
        for row in rows:
            fh.write(json.dumps({k: (None if v is None else v) for k, v in row.items()}, sort_keys=False))
            fh.write("\n")
