"""One-vs-rest ROC curves and AUC.

The curve walks score groups in descending order (tied scores form one group,
which is what gives the Mann-Whitney half-credit-for-ties area under the
trapezoid rule). Candidate thresholds are the distinct scores, bracketed by
+inf at (0, 0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DataError

log = logging.getLogger(__name__)


@dataclass
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float


def binary_roc(scores, labels) -> RocCurve:
    """ROC of real-valued scores against binary labels (1 = positive)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be equal-length vectors")
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("binary ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = pos[order]
    # group boundaries where the descending score strictly drops
    boundary = np.nonzero(np.diff(s))[0]
    ends = np.concatenate([boundary, [s.size - 1]])
    tp = np.cumsum(y)[ends]
    fp = np.cumsum(~y)[ends]
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    thresholds = np.concatenate([[np.inf], s[ends]])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auc=auc)


def binary_auc(scores, labels) -> float:
    return binary_roc(scores, labels).auc


def roc_auc_ovr(scores: np.ndarray, labels) -> tuple[dict[str, RocCurve], float, list[str]]:
    """Per-class one-vs-rest ROC over a (B, K) score matrix.

    Classes absent from labels get no curve and are excluded from the macro
    mean; each exclusion is reported in the returned warning list.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.ndim != 2 or scores.shape[0] != labels.shape[0]:
        raise DataError(f"scores must be (B, K) aligned with labels, got {scores.shape}")
    k = scores.shape[1]
    curves: dict[str, RocCurve] = {}
    warnings: list[str] = []
    aucs = []
    for c in range(k):
        indicator = (labels == c).astype(np.int64)
        if indicator.sum() in (0, labels.size):
            msg = f"class {c} absent from labels; AUC undefined and excluded from macro"
            warnings.append(msg)
            log.warning(msg)
            continue
        curve = binary_roc(scores[:, c], indicator)
        curves[str(c)] = curve
        aucs.append(curve.auc)
    if not aucs:
        raise DataError("no class had both positives and negatives")
    return curves, float(np.mean(aucs)), warnings
