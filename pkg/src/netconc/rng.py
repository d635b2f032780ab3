"""Keyed random streams.

Each stream is a Philox (counter-based) generator seeded from the user seed
plus a tuple of keys, e.g. ``stream(seed, "exp1", "random", 17)``. Streams
for different keys are statistically independent, so a replication's draws
do not depend on which thread ran it or in what order.
"""
from __future__ import annotations

import hashlib
import os

import numpy as np

#: bump if the key-to-entropy mapping ever changes
STREAM_VERSION = 1
SEED_ENV = "NETCONC_SEED"
DEFAULT_SEED = 20240101


def _key_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"stream keys must be nonnegative, got {key}")
        return int(key)
    digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def stream(seed: int, *keys) -> np.random.Generator:
    entropy = [STREAM_VERSION, int(seed) & 0xFFFFFFFFFFFFFFFF] + [_key_int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_generator(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream(int(seed_or_rng))


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else DEFAULT_SEED
