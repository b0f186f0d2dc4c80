"""Second-order gradient boosting for binary logistic classification.

Each round fits one regression tree to the first/second-order gradients of the
weighted logistic loss by exact greedy search over sorted unique feature
values (midpoint thresholds). Missing values learn a per-split default
direction by evaluating the gain with missing rows sent each way. Gain ties
break toward the lower feature index, then the lower threshold, so results do
not depend on scan order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError
from ..evaluation import binary_auc, macro_f1_score
from ..rng import stream
from .trees import Ensemble, Tree, TreeBuilder

log = logging.getLogger(__name__)


@dataclass
class GbdtConfig:
    max_depth: int = 6
    learning_rate: float = 0.05
    max_rounds: int = 500
    row_subsample: float = 0.8
    col_subsample: float = 0.8
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0
    scale_pos_weight: float | None = None   # None = auto (#neg / #pos)
    patience: int = 50
    metric: str = "auc"                     # "auc" | "macro-f1"
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ConfigError("learning_rate must be in (0, 1]")
        if not 0 < self.row_subsample <= 1 or not 0 < self.col_subsample <= 1:
            raise ConfigError("subsample fractions must be in (0, 1]")
        if self.metric not in ("auc", "macro-f1"):
            raise ConfigError(f"unknown early-stop metric '{self.metric}'")


@dataclass
class RoundRecord:
    round: int
    train_loss: float
    valid_metric: float | None


@dataclass
class TrainResult:
    ensemble: Ensemble
    history: list[RoundRecord] = field(default_factory=list)
    best_round: int | None = None
    best_metric: float | None = None
    scale_pos_weight: float = 1.0


def _best_split_for_feature(x, g, h, g_total, h_total, lam, mcw):
    """Best (gain, threshold, default_left, parent_gain_base) on one feature.

    Returns None when the feature admits no valid split.
    """
    miss = np.isnan(x)
    xp, gp, hp = x[~miss], g[~miss], h[~miss]
    if xp.size < 2:
        return None
    order = np.argsort(xp, kind="stable")
    xs, gs, hs = xp[order], gp[order], hp[order]
    cut = np.nonzero(np.diff(xs))[0]
    if cut.size == 0:
        return None
    g_miss = float(g[miss].sum())
    h_miss = float(h[miss].sum())

    cum_g = np.cumsum(gs)[cut]
    cum_h = np.cumsum(hs)[cut]
    thresholds = (xs[cut] + xs[cut + 1]) / 2.0
    valid = thresholds > xs[cut]          # guard against midpoint rounding down

    parent = g_total**2 / (h_total + lam)
    best = None
    for missing_left in (True, False):
        gl = cum_g + g_miss if missing_left else cum_g
        hl = cum_h + h_miss if missing_left else cum_h
        gr = g_total - gl
        hr = h_total - hl
        ok = valid & (hl >= mcw) & (hr >= mcw)
        if not ok.any():
            continue
        gain = np.where(
            ok,
            0.5 * (gl**2 / (hl + lam) + gr**2 / (hr + lam) - parent),
            -np.inf,
        )
        i = int(np.argmax(gain))          # first max: lowest threshold wins ties
        cand = (float(gain[i]), float(thresholds[i]), missing_left)
        # default-direction tie goes left; scanning True first makes >= redundant
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def _grow_tree(X, g, h, w, rows, cols, config) -> Tree:
    builder = TreeBuilder()

    def grow(rows: np.ndarray, depth: int) -> int:
        g_sum = float(g[rows].sum())
        h_sum = float(h[rows].sum())
        cover = float(w[rows].sum())
        leaf_value = -g_sum / (h_sum + config.reg_lambda)
        if depth >= config.max_depth or rows.size < 2:
            return builder.add_leaf(leaf_value, cover)

        best = None
        for f in cols:                     # ascending: lower index wins ties
            cand = _best_split_for_feature(
                X[rows, f], g[rows], h[rows], g_sum, h_sum,
                config.reg_lambda, config.min_child_weight,
            )
            if cand is not None and (best is None or cand[0] > best[1][0]):
                best = (int(f), cand)
        if best is None or best[1][0] <= 0.0:
            return builder.add_leaf(leaf_value, cover)

        feat, (gain, threshold, missing_left) = best
        x = X[rows, feat]
        go_left = np.where(np.isnan(x), missing_left, x < threshold)
        node = builder.add_split(feat, threshold, missing_left, cover)
        left = grow(rows[go_left], depth + 1)
        right = grow(rows[~go_left], depth + 1)
        builder.wire(node, left, right)
        return node

    grow(rows, 0)
    return builder.build()


def _weighted_logloss(margin, y, w) -> float:
    # -[y log p + (1-y) log(1-p)] written stably in the margin
    per = np.maximum(margin, 0) - margin * y + np.log1p(np.exp(-np.abs(margin)))
    return float(np.sum(w * per) / np.sum(w))


def _eval_metric(metric: str, margin, y) -> float:
    if metric == "auc":
        return binary_auc(margin, y)
    pred = (margin > 0).astype(np.int64)
    return macro_f1_score(y.astype(np.int64), pred, 2)


def train_gbdt(X, y, config: GbdtConfig,
               valid: tuple[np.ndarray, np.ndarray] | None = None) -> TrainResult:
    """Boost until max_rounds or until the validation metric stops improving.

    With a validation pair, training stops after `patience` rounds without
    improvement and the returned ensemble is truncated to the best round.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DataError("X must be (n, m) with matching labels")
    if np.any(np.isnan(y)):
        raise DataError("labels contain NaN")
    if set(np.unique(y)) - {0.0, 1.0}:
        raise DataError("labels must be binary 0/1")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("training needs at least one sample of each class")

    spw = config.scale_pos_weight
    if spw is None:
        spw = n_neg / n_pos
    w = np.where(y == 1, spw, 1.0)
    base_score = float(np.log((spw * n_pos) / n_neg))

    n, m = X.shape
    ensemble = Ensemble(trees=[], base_score=base_score,
                        learning_rate=config.learning_rate, num_features=m)
    margin = np.full(n, base_score)
    valid_margin = None
    if valid is not None:
        Xv = np.asarray(valid[0], dtype=np.float64)
        yv = np.asarray(valid[1], dtype=np.float64)
        valid_margin = np.full(Xv.shape[0], base_score)

    rng = stream(config.seed, "gbdt")
    n_rows = max(1, int(round(config.row_subsample * n)))
    n_cols = max(1, int(round(config.col_subsample * m)))
    history: list[RoundRecord] = []
    best_metric, best_round = -np.inf, None

    for rnd in range(config.max_rounds):
        p = 1.0 / (1.0 + np.exp(-margin))
        g = (p - y) * w
        h = np.maximum(p * (1.0 - p), 1e-16) * w

        rows = (np.arange(n) if n_rows == n
                else np.sort(rng.choice(n, size=n_rows, replace=False)))
        cols = (np.arange(m) if n_cols == m
                else np.sort(rng.choice(m, size=n_cols, replace=False)))
        tree = _grow_tree(X, g, h, w, rows, cols, config)
        ensemble.trees.append(tree)
        margin += config.learning_rate * tree.predict(X)

        record = RoundRecord(round=rnd, train_loss=_weighted_logloss(margin, y, w),
                             valid_metric=None)
        if valid_margin is not None:
            valid_margin += config.learning_rate * tree.predict(Xv)
            record.valid_metric = _eval_metric(config.metric, valid_margin, yv)
            if record.valid_metric > best_metric:
                best_metric, best_round = record.valid_metric, rnd
            elif rnd - best_round >= config.patience:
                history.append(record)
                break
        history.append(record)

    if valid is not None and best_round is not None:
        log.info("early stop: best %s %.6f at round %d", config.metric,
                 best_metric, best_round)
        return TrainResult(ensemble=ensemble.prefix(best_round + 1),
                           history=history, best_round=best_round,
                           best_metric=float(best_metric),
                           scale_pos_weight=float(spw))
    return TrainResult(ensemble=ensemble, history=history,
                       scale_pos_weight=float(spw))


def stratified_folds(y, k: int, seed: int) -> np.ndarray:
    """Fold id per row; each class dealt round-robin after a seeded shuffle."""
    y = np.asarray(y)
    folds = np.empty(y.size, dtype=np.int64)
    for cls in np.unique(y):
        idx = np.nonzero(y == cls)[0]
        if idx.size < k:
            raise DataError(f"class {cls} has {idx.size} members, fewer than k={k}")
        perm = stream(seed, "cv", cls).permutation(idx.size)
        folds[idx[perm]] = np.arange(idx.size) % k
    return folds


def cross_validate(X, y, config: GbdtConfig, k: int = 5,
                   seed: int = 0) -> dict:
    """Stratified k-fold training; per-fold AUC and macro-F1 with mean +- sd."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    folds = stratified_folds(y, k, seed)
    auc_scores, f1_scores = [], []
    for fold in range(k):
        hold = folds == fold
        result = train_gbdt(X[~hold], y[~hold], config)
        margin = result.ensemble.predict_margin(X[hold])
        auc_scores.append(binary_auc(margin, y[hold]))
        f1_scores.append(macro_f1_score(y[hold].astype(np.int64),
                                        (margin > 0).astype(np.int64), 2))
    return {
        "folds": [{"auc": a, "macro_f1": f} for a, f in zip(auc_scores, f1_scores)],
        "auc_mean": float(np.mean(auc_scores)),
        "auc_sd": float(np.std(auc_scores)),
        "macro_f1_mean": float(np.mean(f1_scores)),
        "macro_f1_sd": float(np.std(f1_scores)),
    }
