"""Shared random generators for tree/ensemble tests."""

from __future__ import annotations

import numpy as np

from fusiondx.gbdt import Ensemble, Tree


def random_tree(rng: np.random.Generator, num_features: int,
                max_depth: int) -> Tree:
    """Random binary tree with positive covers satisfying parent = left + right."""
    feature, threshold, default_left = [], [], []
    left, right, value, cover = [], [], [], []

    def grow(depth: int) -> tuple[int, float]:
        idx = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        default_left.append(bool(rng.integers(2)))
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        cover.append(0.0)
        if depth >= max_depth or rng.random() < 0.25:
            value[idx] = float(rng.standard_normal())
            cover[idx] = float(rng.integers(1, 20))
            return idx, cover[idx]
        feature[idx] = int(rng.integers(num_features))
        threshold[idx] = float(rng.standard_normal())
        li, cl = grow(depth + 1)
        ri, cr = grow(depth + 1)
        left[idx], right[idx] = li, ri
        cover[idx] = cl + cr
        return idx, cover[idx]

    grow(0)
    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        default_left=np.asarray(default_left, dtype=bool),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
        cover=np.asarray(cover, dtype=np.float64),
    )


def random_ensemble(rng: np.random.Generator, num_features: int = 6,
                    max_depth: int = 3, max_trees: int = 10) -> Ensemble:
    n_trees = int(rng.integers(1, max_trees + 1))
    return Ensemble(
        trees=[random_tree(rng, num_features, max_depth) for _ in range(n_trees)],
        base_score=float(rng.standard_normal() * 0.5),
        learning_rate=float(rng.uniform(0.05, 1.0)),
        num_features=num_features,
    )


def random_row(rng: np.random.Generator, num_features: int,
               missing_rate: float = 0.2) -> np.ndarray:
    row = rng.standard_normal(num_features)
    row[rng.random(num_features) < missing_rate] = np.nan
    return row
