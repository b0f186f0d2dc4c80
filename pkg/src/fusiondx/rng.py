"""Deterministic random-stream derivation.

Every stochastic component derives its generator from (seed, *tags) through
SHA-256 rather than sharing one global stream. Streams are therefore stable
across platforms, process restarts, and unrelated code changes, and per-item
streams (e.g. one per patch id) make parallel execution order-independent.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, *tags: object) -> int:
    """Collapse (seed, tags...) into a 64-bit seed via SHA-256."""
    text = ":".join([str(int(seed))] + [str(t) for t in tags])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stream(seed: int, *tags: object) -> np.random.Generator:
    """A PCG64 generator keyed by (seed, tags...)."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *tags)))
