from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from netconc.core import BinaryGraph, WeightVector

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def data_dir():
    return DATA


def weights_from(raw):
    """Normalize a nonnegative vector with positive sum into a WeightVector."""
    v = np.asarray(raw, dtype=float)
    return WeightVector(v / v.sum())


@st.composite
def weight_vectors(draw, n=None, min_n=2, max_n=12):
    n = n if n is not None else draw(st.integers(min_n, max_n))
    raw = draw(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=n, max_size=n))
    raw = np.asarray(raw) + 1e-3
    return weights_from(raw)


@st.composite
def graphs(draw, n):
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return BinaryGraph(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def weights_and_graph(draw, min_n=2, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return draw(weight_vectors(n=n)), draw(graphs(n))


def random_instance(rng, n, p=None):
    """Weight vector and graph drawn with a numpy generator (for bulk fuzzing)."""
    w = weights_from(rng.random(n) + 1e-3)
    p = rng.random() if p is None else p
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return w, BinaryGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))
