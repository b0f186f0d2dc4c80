"""Stratified train/val/test assignment, shared by the patch and tabular pipelines.

Per-class counts follow largest-remainder apportionment, so each class deviates
from the requested fractions by at most one entry per split.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import DataError
from .rng import stream

SPLIT_NAMES = ("train", "val", "test")


def apportion(n: int, fractions: Sequence[float]) -> list[int]:
    """Split integer n into parts proportional to fractions (largest remainder).

    Ties in the remainder go to the earlier split.
    """
    exact = [n * f for f in fractions]
    counts = [int(np.floor(e)) for e in exact]
    short = n - sum(counts)
    remainders = sorted(
        range(len(fractions)), key=lambda i: (-(exact[i] - counts[i]), i)
    )
    for i in remainders[:short]:
        counts[i] += 1
    return counts


def stratified_assignment(
    labels: Sequence[object],
    fractions: Sequence[float],
    seed: int,
    stratify: bool = True,
) -> list[str]:
    """Assign each entry to train/val/test.

    fractions must be nonnegative and sum to 1 within 1e-9. With stratify,
    apportionment runs per label value; otherwise over the whole index set.
    Deterministic given seed.
    """
    if len(fractions) != len(SPLIT_NAMES):
        raise DataError(f"expected {len(SPLIT_NAMES)} fractions, got {len(fractions)}")
    if any(f < 0 for f in fractions):
        raise DataError("split fractions must be nonnegative")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"split fractions sum to {sum(fractions)!r}, expected 1")

    labels = list(labels)
    assignment = [""] * len(labels)
    if stratify:
        groups: dict[object, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
    else:
        groups = {None: list(range(len(labels)))}

    for key in sorted(groups, key=str):
        idx = np.array(groups[key], dtype=np.int64)
        order = stream(seed, "split", key).permutation(len(idx))
        shuffled = idx[order]
        counts = apportion(len(idx), fractions)
        pos = 0
        for name, c in zip(SPLIT_NAMES, counts):
            for i in shuffled[pos : pos + c]:
                assignment[int(i)] = name
            pos += c
    return assignment
