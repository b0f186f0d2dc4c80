"""Confusion matrices and the derived classification metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError


@dataclass
class ConfusionMatrix:
    """K x K counts; rows are true classes, columns predicted classes."""

    counts: np.ndarray
    class_names: list[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.class_names)
        if self.counts.shape != (k, k):
            raise DataError(f"confusion counts {self.counts.shape} != ({k}, {k})")
        if np.any(self.counts < 0):
            raise DataError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class EvaluationReport:
    """Decision-quality summary for one model on one split.

    AUC and calibration fields stay None until the caller attaches them;
    counts-derived metrics are always present.
    """

    confusion: ConfusionMatrix
    per_class: list[dict]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class_auc: dict[str, float] | None = None
    macro_auc: float | None = None
    calibration: dict | None = None
    threshold_policy: dict | None = None
    notes: list[str] = field(default_factory=list)


def confusion_matrix(y_true, y_pred, num_classes: int,
                     class_names: list[str] | None = None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise DataError("y_true and y_pred lengths differ")
    for name, arr in (("y_true", y_true), ("y_pred", y_pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise DataError(f"{name} labels outside [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    names = class_names or [f"class_{i}" for i in range(num_classes)]
    return ConfusionMatrix(counts, list(names))


def classification_metrics(cm: ConfusionMatrix) -> EvaluationReport:
    """Per-class precision/recall/F1 plus unweighted macro aggregates.

    Precision of a never-predicted class is defined as 0; same for recall of
    an absent class and for F1 when precision + recall is 0.
    """
    counts = cm.counts
    if counts.sum() == 0:
        raise DataError("empty confusion matrix")
    k = counts.shape[0]
    row = counts.sum(axis=1).astype(np.float64)
    col = counts.sum(axis=0).astype(np.float64)
    diag = np.diag(counts).astype(np.float64)

    per_class = []
    for i in range(k):
        recall = diag[i] / row[i] if row[i] > 0 else 0.0
        precision = diag[i] / col[i] if col[i] > 0 else 0.0
        f1 = (2 * precision * recall / (precision + recall)
              if precision + recall > 0 else 0.0)
        per_class.append({
            "name": cm.class_names[i],
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": int(row[i]),
        })
    return EvaluationReport(
        confusion=cm,
        per_class=per_class,
        accuracy=float(diag.sum() / counts.sum()),
        macro_precision=float(np.mean([c["precision"] for c in per_class])),
        macro_recall=float(np.mean([c["recall"] for c in per_class])),
        macro_f1=float(np.mean([c["f1"] for c in per_class])),
    )


def macro_f1_score(y_true, y_pred, num_classes: int) -> float:
    return classification_metrics(
        confusion_matrix(y_true, y_pred, num_classes)
    ).macro_f1
