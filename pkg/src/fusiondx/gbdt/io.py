"""Ensemble JSON serialization and attribution CSV output."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .trees import Ensemble, Tree


def tree_to_dict(tree: Tree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "default_left": tree.default_left.astype(int).tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
        "cover": tree.cover.tolist(),
    }


def tree_from_dict(d: dict) -> Tree:
    return Tree(
        feature=np.asarray(d["feature"], dtype=np.int64),
        threshold=np.asarray(d["threshold"], dtype=np.float64),
        default_left=np.asarray(d["default_left"], dtype=bool),
        left=np.asarray(d["left"], dtype=np.int64),
        right=np.asarray(d["right"], dtype=np.int64),
        value=np.asarray(d["value"], dtype=np.float64),
        cover=np.asarray(d["cover"], dtype=np.float64),
    )


def save_ensemble(path: str | Path, ensemble: Ensemble,
                  feature_names: list[str] | None = None,
                  extra: dict | None = None) -> None:
    doc = {
        "base_score": ensemble.base_score,
        "learning_rate": ensemble.learning_rate,
        "num_features": ensemble.num_features,
        "feature_names": feature_names,
        "trees": [tree_to_dict(t) for t in ensemble.trees],
    }
    doc.update(extra or {})
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_ensemble(path: str | Path) -> tuple[Ensemble, dict]:
    doc = json.loads(Path(path).read_text())
    ensemble = Ensemble(
        trees=[tree_from_dict(t) for t in doc["trees"]],
        base_score=doc["base_score"],
        learning_rate=doc["learning_rate"],
        num_features=doc["num_features"],
    )
    return ensemble, doc


def write_attribution_csv(path: str | Path, row_ids, feature_names,
                          phis: np.ndarray, bases: np.ndarray) -> None:
    """Long-form (row id, feature, phi) rows plus one base_value row per id."""
    lines = ["row_id,feature,phi"]
    for rid, phi_row, base in zip(row_ids, phis, bases):
        lines.append(f"{rid},__base__,{base!r}")
        for name, phi in zip(feature_names, phi_row):
            lines.append(f"{rid},{name},{phi!r}")
    Path(path).write_text("\n".join(lines) + "\n")
