"""Operating-point selection on binary scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError


@dataclass
class ThresholdPolicy:
    kind: str                   # "youden" | "precision-target"
    threshold: float
    sensitivity: float
    specificity: float
    precision: float
    j: float
    target: float | None = None
    attained: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "threshold": self.threshold,
            "sensitivity": self.sensitivity, "specificity": self.specificity,
            "precision": self.precision, "j": self.j,
            "target": self.target, "attained": self.attained,
        }


def _operating_points(scores, labels):
    """Candidate thresholds (midpoints of adjacent distinct scores, descending)
    with the confusion counts of predicting positive at score >= threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be equal-length vectors")
    pos = labels == 1
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("threshold selection needs both classes present")

    order = np.argsort(-scores, kind="stable")
    s, y = scores[order], pos[order]
    ends = np.concatenate([np.nonzero(np.diff(s))[0], [s.size - 1]])
    uniq = s[ends]                      # distinct scores, descending
    tp = np.cumsum(y)[ends].astype(np.float64)
    fp = np.cumsum(~y)[ends].astype(np.float64)
    if uniq.size == 1:
        cands = uniq.copy()             # all scores equal: stay in range
        tp_c, fp_c = tp, fp
    else:
        cands = (uniq[:-1] + uniq[1:]) / 2.0
        tp_c, fp_c = tp[:-1], fp[:-1]
    return cands, tp_c, fp_c, n_pos, n_neg


def _policy(kind, threshold, tp, fp, n_pos, n_neg, target=None, attained=True):
    sens = tp / n_pos
    spec = 1.0 - fp / n_neg
    prec = tp / (tp + fp) if tp + fp > 0 else 0.0
    return ThresholdPolicy(kind=kind, threshold=float(threshold),
                           sensitivity=float(sens), specificity=float(spec),
                           precision=float(prec), j=float(sens + spec - 1.0),
                           target=target, attained=attained)


def youden_threshold(scores, labels) -> ThresholdPolicy:
    """Threshold maximizing J = sensitivity + specificity - 1.

    Ties go to the larger threshold (higher specificity). Candidates are the
    midpoints between adjacent distinct scores, so the result always lies
    inside the observed score range.
    """
    cands, tp, fp, n_pos, n_neg = _operating_points(scores, labels)
    j = tp / n_pos - fp / n_neg
    best = int(np.argmax(j))            # candidates are descending: first max wins
    return _policy("youden", cands[best], tp[best], fp[best], n_pos, n_neg)


def precision_target_threshold(scores, labels, p: float) -> ThresholdPolicy:
    """Smallest threshold whose precision reaches p.

    Unattainable targets fall back to the maximum-precision threshold with
    attained=False.
    """
    if not 0.0 <= p <= 1.0:
        raise DataError(f"precision target must be in [0, 1], got {p}")
    cands, tp, fp, n_pos, n_neg = _operating_points(scores, labels)
    precision = np.where(tp + fp > 0, tp / np.maximum(tp + fp, 1e-300), 0.0)
    ok = np.nonzero(precision >= p)[0]
    if ok.size:
        best = int(ok[-1])              # descending candidates: last = smallest
        return _policy("precision-target", cands[best], tp[best], fp[best],
                       n_pos, n_neg, target=p)
    best = int(np.argmax(precision[::-1]))      # max precision, smallest threshold
    best = precision.size - 1 - best
    return _policy("precision-target", cands[best], tp[best], fp[best],
                   n_pos, n_neg, target=p, attained=False)
