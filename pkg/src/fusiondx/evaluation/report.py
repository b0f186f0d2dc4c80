"""EvaluationReport serialization and cross-checks against claimed metrics."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .confusion import ConfusionMatrix, EvaluationReport

CLAIM_TOLERANCE = 5e-3


def flag_metric_claims(report: EvaluationReport, claims: dict[str, float],
                       tol: float = CLAIM_TOLERANCE) -> list[str]:
    """Compare externally claimed headline metrics against the counts-derived
    values in the report; return one note per disagreement.

    Use this when a report is rebuilt from published confusion counts and the
    same source also states summary numbers: any mismatch is surfaced instead
    of silently preferring one of the two.
    """
    derived = {
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
    }
    if report.macro_auc is not None:
        derived["macro_auc"] = report.macro_auc
    notes = []
    for key, claimed in claims.items():
        if key not in derived:
            notes.append(f"claimed metric '{key}' has no counts-derived counterpart")
            continue
        got = derived[key]
        if abs(got - claimed) > tol:
            notes.append(
                f"inconsistent {key}: claimed {claimed:.4f} but confusion counts "
                f"imply {got:.4f}"
            )
    return notes


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "class_names": report.confusion.class_names,
        "confusion": report.confusion.counts.tolist(),
        "per_class": report.per_class,
        "accuracy": report.accuracy,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "macro_f1": report.macro_f1,
        "per_class_auc": report.per_class_auc,
        "macro_auc": report.macro_auc,
        "calibration": report.calibration,
        "threshold_policy": report.threshold_policy,
        "notes": report.notes,
    }


def report_from_dict(d: dict) -> EvaluationReport:
    cm = ConfusionMatrix(np.asarray(d["confusion"]), list(d["class_names"]))
    return EvaluationReport(
        confusion=cm,
        per_class=list(d["per_class"]),
        accuracy=d["accuracy"],
        macro_precision=d["macro_precision"],
        macro_recall=d["macro_recall"],
        macro_f1=d["macro_f1"],
        per_class_auc=d.get("per_class_auc"),
        macro_auc=d.get("macro_auc"),
        calibration=d.get("calibration"),
        threshold_policy=d.get("threshold_policy"),
        notes=list(d.get("notes", [])),
    )


def save_report(path: str | Path, report: EvaluationReport) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report), sort_keys=True,
                                     indent=2) + "\n")


def load_report(path: str | Path) -> EvaluationReport:
    return report_from_dict(json.loads(Path(path).read_text()))
