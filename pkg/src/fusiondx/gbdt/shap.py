"""Exact per-feature Shapley attribution for boosted tree ensembles.

`tree_shap` runs the polynomial-time path recursion: it tracks, for every
unique feature on the current root-to-node path, the fraction of feature
subsets that let the path proceed (weighted by cover when a feature is
excluded), and converts those fractions into Shapley weights at the leaves.

`exact_shap_oracle` recomputes the same quantity by brute force, valuing every
feature subset with the cover-weighted conditional expectation; it exists to
cross-check tree_shap and is exponential by design.

Both satisfy local accuracy: base value + sum(phi) equals the ensemble margin.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from .trees import Ensemble, Tree

ORACLE_MAX_FEATURES = 12


class _PathElement:
    __slots__ = ("d", "z", "o", "w")

    def __init__(self, d, z, o, w):
        self.d = d    # feature index of the split that added this element
        self.z = z    # fraction of paths that flow through when d is excluded
        self.o = o    # 1 if x routes through this split when d is included
        self.w = w    # proportion of subsets of each size reaching the node

    def copy(self):
        return _PathElement(self.d, self.z, self.o, self.w)


def _extend(path: list[_PathElement], pz: float, po: float, pi: int) -> list[_PathElement]:
    path = [e.copy() for e in path]
    n = len(path)
    path.append(_PathElement(pi, pz, po, 1.0 if n == 0 else 0.0))
    for i in range(n - 1, -1, -1):
        path[i + 1].w += po * path[i].w * (i + 1) / (n + 1)
        path[i].w = pz * path[i].w * (n - i) / (n + 1)
    return path


def _unwind(path: list[_PathElement], i: int) -> list[_PathElement]:
    path = [e.copy() for e in path]
    length = len(path)
    n = path[-1].w
    one, zero = path[i].o, path[i].z
    for j in range(length - 2, -1, -1):
        if one != 0:
            t = path[j].w
            path[j].w = n * length / ((j + 1) * one)
            n = t - path[j].w * zero * (length - 1 - j) / length
        else:
            path[j].w = path[j].w * length / (zero * (length - 1 - j))
    for j in range(i, length - 1):
        path[j].d = path[j + 1].d
        path[j].z = path[j + 1].z
        path[j].o = path[j + 1].o
    path.pop()
    return path


def _unwound_weight_sum(path: list[_PathElement], i: int) -> float:
    """Total weight after removing element i, without materializing the copy."""
    length = len(path)
    n = path[-1].w
    one, zero = path[i].o, path[i].z
    total = 0.0
    for j in range(length - 2, -1, -1):
        if one != 0:
            t = n * length / ((j + 1) * one)
            total += t
            n = path[j].w - t * zero * (length - 1 - j) / length
        else:
            total += path[j].w * length / (zero * (length - 1 - j))
    return total


def _route(tree: Tree, node: int, x: np.ndarray) -> tuple[int, int]:
    """(hot child, cold child): where x actually flows, and the other branch."""
    f = tree.feature[node]
    xv = x[f]
    if np.isnan(xv):
        left = bool(tree.default_left[node])
    else:
        left = bool(xv < tree.threshold[node])
    l, r = int(tree.left[node]), int(tree.right[node])
    return (l, r) if left else (r, l)


def _tree_shap_single(tree: Tree, x: np.ndarray, phi: np.ndarray) -> None:
    def recurse(node: int, path: list[_PathElement], pz: float, po: float, pi: int):
        path = _extend(path, pz, po, pi)
        if tree.is_leaf(node):
            value = float(tree.value[node])
            for i in range(1, len(path)):
                w = _unwound_weight_sum(path, i)
                phi[path[i].d] += w * (path[i].o - path[i].z) * value
            return
        hot, cold = _route(tree, node, x)
        f = int(tree.feature[node])
        iz, io = 1.0, 1.0
        for k in range(1, len(path)):
            if path[k].d == f:
                iz, io = path[k].z, path[k].o
                path = _unwind(path, k)
                break
        r_node = tree.cover[node]
        recurse(hot, path, iz * tree.cover[hot] / r_node, io, f)
        recurse(cold, path, iz * tree.cover[cold] / r_node, 0.0, f)

    recurse(0, [], 1.0, 1.0, -1)


def tree_shap(ensemble: Ensemble, x) -> tuple[np.ndarray, float]:
    """(phi per feature, base value) for one row.

    phi sums per-tree attributions scaled by the shrinkage; the base value is
    the cover-weighted expected margin. base + sum(phi) reconstructs
    predict_margin(x) exactly (local accuracy).
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != ensemble.num_features:
        raise DataError(
            f"row has {x.size} features, ensemble expects {ensemble.num_features}"
        )
    phi = np.zeros(ensemble.num_features)
    base = ensemble.base_score
    for tree in ensemble.trees:
        tree_phi = np.zeros(ensemble.num_features)
        _tree_shap_single(tree, x, tree_phi)
        phi += ensemble.learning_rate * tree_phi
        base += ensemble.learning_rate * tree.expected_value()
    return phi, float(base)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _conditional_expectation(tree: Tree, subset: frozenset, x: np.ndarray) -> float:
    """Tree output when features in `subset` follow x and the rest average
    over children by cover."""
    def walk(node: int) -> float:
        if tree.is_leaf(node):
            return float(tree.value[node])
        f = int(tree.feature[node])
        if f in subset:
            hot, _ = _route(tree, node, x)
            return walk(hot)
        lo, hi = int(tree.left[node]), int(tree.right[node])
        cl, cr = tree.cover[lo], tree.cover[hi]
        return (walk(lo) * cl + walk(hi) * cr) / (cl + cr)
    return walk(0)


def exact_shap_oracle(ensemble: Ensemble, x) -> tuple[np.ndarray, float]:
    """Shapley values by full subset enumeration (2^M conditional expectations).

    Only usable for num_features <= 12; intended as the independent check for
    tree_shap, sharing nothing but the routing and expectation definitions.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    m = ensemble.num_features
    if x.size != m:
        raise DataError(f"row has {x.size} features, ensemble expects {m}")
    if m > ORACLE_MAX_FEATURES:
        raise DataError(
            f"oracle enumeration is limited to {ORACLE_MAX_FEATURES} features"
        )

    import math

    phi = np.zeros(m)
    base = ensemble.base_score
    fact = [math.factorial(i) for i in range(m + 1)]
    for tree in ensemble.trees:
        values: dict[int, float] = {}
        for mask in range(2**m):
            subset = frozenset(i for i in range(m) if mask >> i & 1)
            values[mask] = _conditional_expectation(tree, subset, x)
        for i in range(m):
            total = 0.0
            for mask in range(2**m):
                if mask >> i & 1:
                    continue
                s = bin(mask).count("1")
                weight = fact[s] * fact[m - s - 1] / fact[m]
                total += weight * (values[mask | (1 << i)] - values[mask])
            phi[i] += ensemble.learning_rate * total
        base += ensemble.learning_rate * values[0]
    return phi, float(base)


def global_importance(ensemble: Ensemble, X_background) -> list[tuple[int, float]]:
    """Mean |phi| per feature over background rows, sorted descending."""
    X = np.asarray(X_background, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("background must be a nonempty (n, m) matrix")
    totals = np.zeros(ensemble.num_features)
    for row in X:
        phi, _ = tree_shap(ensemble, row)
        totals += np.abs(phi)
    means = totals / X.shape[0]
    order = np.argsort(-means, kind="stable")
    return [(int(i), float(means[i])) for i in order]
