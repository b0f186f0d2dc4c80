"""Regression tree storage and vectorized ensemble prediction.

Trees live in flat parallel arrays (feature < 0 marks a leaf). Rows with a
missing (NaN) split feature follow the stored default direction learned at
training time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError


@dataclass
class Tree:
    feature: np.ndarray        # int64, -1 at leaves
    threshold: np.ndarray      # float64
    default_left: np.ndarray   # bool
    left: np.ndarray           # int64 child ids, -1 at leaves
    right: np.ndarray
    value: np.ndarray          # float64 leaf margin contribution
    cover: np.ndarray          # float64 training weight mass per node

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] < 0

    def depth(self) -> int:
        def walk(node, d):
            if self.is_leaf(node):
                return d
            return max(walk(self.left[node], d + 1), walk(self.right[node], d + 1))
        return walk(0, 0)

    def used_features(self) -> set[int]:
        return set(int(f) for f in self.feature if f >= 0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf value per row; missing values routed by default directions."""
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        while True:
            feat = self.feature[node]
            internal = feat >= 0
            if not internal.any():
                break
            rows = np.nonzero(internal)[0]
            cur = node[rows]
            x = X[rows, feat[rows]]
            go_left = np.where(np.isnan(x), self.default_left[cur],
                               x < self.threshold[cur])
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
        return self.value[node]

    def expected_value(self) -> float:
        """Cover-weighted mean leaf value (the tree's output on an average path)."""
        def walk(node) -> float:
            if self.is_leaf(node):
                return float(self.value[node])
            lo, hi = int(self.left[node]), int(self.right[node])
            cl, cr = self.cover[lo], self.cover[hi]
            return float((walk(lo) * cl + walk(hi) * cr) / (cl + cr))
        return walk(0)


class TreeBuilder:
    """Accumulates nodes during greedy growth, then freezes into a Tree."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.default_left: list[bool] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.cover: list[float] = []

    def add_leaf(self, value: float, cover: float) -> int:
        return self._add(-1, 0.0, True, -1, -1, value, cover)

    def add_split(self, feature: int, threshold: float, default_left: bool,
                  cover: float) -> int:
        return self._add(feature, threshold, default_left, -1, -1, 0.0, cover)

    def _add(self, f, t, d, l, r, v, c) -> int:
        self.feature.append(f)
        self.threshold.append(t)
        self.default_left.append(d)
        self.left.append(l)
        self.right.append(r)
        self.value.append(v)
        self.cover.append(c)
        return len(self.feature) - 1

    def wire(self, parent: int, left: int, right: int) -> None:
        self.left[parent] = left
        self.right[parent] = right

    def build(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            default_left=np.asarray(self.default_left, dtype=bool),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            value=np.asarray(self.value, dtype=np.float64),
            cover=np.asarray(self.cover, dtype=np.float64),
        )


@dataclass
class Ensemble:
    """Boosted trees: prediction = sigmoid(base_score + lr * sum of trees)."""

    trees: list[Tree] = field(default_factory=list)
    base_score: float = 0.0
    learning_rate: float = 0.05
    num_features: int = 0

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.num_features:
            raise DataError(
                f"expected {self.num_features} features, got shape {X.shape}"
            )
        return X

    def predict_margin(self, X: np.ndarray) -> np.ndarray:
        X = self._check(X)
        margin = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            margin += self.learning_rate * tree.predict(X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.predict_margin(X)))

    def prefix(self, n_trees: int) -> "Ensemble":
        return Ensemble(trees=self.trees[:n_trees], base_score=self.base_score,
                        learning_rate=self.learning_rate,
                        num_features=self.num_features)
