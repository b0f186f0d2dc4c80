"""Replayable tabular preprocessing.

fit_preprocessor learns everything from the training split: which columns to
drop (missingness strictly above the threshold, or zero variance), imputation
statistics, scaling statistics, one-hot vocabularies (first-seen order), and
which columns get a binary missing-indicator companion. apply_preprocessor
replays the recipe on any table, either fully imputed for neural consumers or
with continuous missingness preserved for the boosting path, which routes
missing values itself.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError
from .table import ColumnSpec, FeatureTable

log = logging.getLogger(__name__)


@dataclass
class PrepConfig:
    missing_threshold: float = 0.8
    # "auto" flags every retained column with observed training missingness;
    # a list flags exactly those columns; None disables indicators
    indicator_columns: str | list[str] | None = "auto"
    # optional categorical/binary column whose strata define per-group medians
    median_strata: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.missing_threshold <= 1.0:
            raise ConfigError("missing_threshold must be in [0, 1]")


@dataclass
class PreprocessorModel:
    dropped: list[dict] = field(default_factory=list)
    continuous: dict[str, dict] = field(default_factory=dict)
    categorical: dict[str, dict] = field(default_factory=dict)
    binary: dict[str, dict] = field(default_factory=dict)
    retained_order: list[str] = field(default_factory=list)
    indicator_columns: list[str] = field(default_factory=list)
    output_columns: list[str] = field(default_factory=list)
    strata_column: str | None = None

    def to_json(self, path: str | Path) -> None:
        doc = {
            "dropped": self.dropped,
            "continuous": self.continuous,
            "categorical": self.categorical,
            "binary": self.binary,
            "retained_order": self.retained_order,
            "indicator_columns": self.indicator_columns,
            "output_columns": self.output_columns,
            "strata_column": self.strata_column,
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "PreprocessorModel":
        return cls(**json.loads(Path(path).read_text()))


@dataclass
class DesignMatrix:
    values: np.ndarray
    feature_names: list[str]
    row_ids: list[str]

    def to_csv(self, path: str | Path) -> None:
        lines = [",".join(["row_id"] + self.feature_names)]
        for rid, row in zip(self.row_ids, self.values):
            cells = [rid] + ["NA" if np.isnan(v) else repr(float(v)) for v in row]
            lines.append(",".join(cells))
        Path(path).write_text("\n".join(lines) + "\n")


def _mode_value(values: np.ndarray) -> float:
    uniq, counts = np.unique(values, return_counts=True)
    return float(uniq[np.argmax(counts)])          # ties: smaller value


def _first_seen_vocab(values) -> list[str]:
    vocab: list[str] = []
    for v in values:
        if v is not None and v not in vocab:
            vocab.append(str(v))
    return vocab


def fit_preprocessor(table: FeatureTable, config: PrepConfig) -> PreprocessorModel:
    """Learn the preprocessing recipe. Call this on the training split only."""
    if table.n_rows == 0:
        raise DataError("cannot fit a preprocessor on zero rows")
    model = PreprocessorModel(strata_column=config.median_strata)
    n = table.n_rows

    strata_values = None
    if config.median_strata is not None:
        if config.median_strata not in {c.name for c in table.columns}:
            raise ConfigError(f"strata column '{config.median_strata}' not in table")
        strata_values = table.data[config.median_strata]

    for spec in table.columns:
        col = table.data[spec.name]
        miss = table.missing_mask(spec.name)
        frac = float(miss.mean())
        if frac > config.missing_threshold:       # strictly greater: 0.80 stays
            model.dropped.append({"name": spec.name, "reason": "missingness",
                                  "missing_fraction": frac})
            continue
        if spec.kind == "continuous":
            observed = col[~miss]
            if observed.size == 0:
                model.dropped.append({"name": spec.name, "reason": "all-missing",
                                      "missing_fraction": frac})
                continue
            std = float(observed.std())
            if std == 0.0:
                model.dropped.append({"name": spec.name, "reason": "zero-variance",
                                      "missing_fraction": frac})
                log.info("dropping zero-variance column '%s'", spec.name)
                continue
            entry = {
                "median": float(np.median(observed)),
                "mean": float(observed.mean()),
                "std": std,
                "missing_fraction": frac,
            }
            if strata_values is not None and spec.name != config.median_strata:
                per = {}
                for stratum in np.unique(strata_values[~miss].astype(object)):
                    sel = (~miss) & (strata_values.astype(object) == stratum)
                    if sel.any():
                        per[str(stratum)] = float(np.median(col[sel]))
                entry["strata_medians"] = per
            model.continuous[spec.name] = entry
        elif spec.kind == "binary":
            observed = col[~miss]
            if observed.size == 0:
                model.dropped.append({"name": spec.name, "reason": "all-missing",
                                      "missing_fraction": frac})
                continue
            model.binary[spec.name] = {"mode": _mode_value(observed),
                                       "missing_fraction": frac}
        else:
            vocab = _first_seen_vocab(col)
            if not vocab:
                model.dropped.append({"name": spec.name, "reason": "all-missing",
                                      "missing_fraction": frac})
                continue
            values, counts = np.unique(
                np.array([str(v) for v in col[~miss]]), return_counts=True
            )
            top = counts.max()
            tied = {v for v, c in zip(values, counts) if c == top}
            mode = next(v for v in vocab if v in tied)   # ties: first seen
            model.categorical[spec.name] = {
                "mode": mode, "vocab": vocab, "missing_fraction": frac,
            }
        model.retained_order.append(spec.name)

    if not model.retained_order:
        raise DataError("all columns were dropped; nothing to preprocess")

    if config.indicator_columns == "auto":
        model.indicator_columns = [
            name for name in model.retained_order
            if _fit_missing_fraction(model, name) > 0.0
        ]
    elif config.indicator_columns is None:
        model.indicator_columns = []
    else:
        retained = set(model.retained_order)
        model.indicator_columns = [c for c in config.indicator_columns
                                   if c in retained]

    model.output_columns = []
    for name in model.retained_order:
        if name in model.categorical:
            model.output_columns += [
                f"{name}={v}" for v in model.categorical[name]["vocab"]
            ]
        else:
            model.output_columns.append(name)
    model.output_columns += [f"{c}__missing" for c in model.indicator_columns]
    return model


def _fit_missing_fraction(model: PreprocessorModel, name: str) -> float:
    for group in (model.continuous, model.binary, model.categorical):
        if name in group:
            return group[name]["missing_fraction"]
    raise KeyError(name)


def apply_preprocessor(model: PreprocessorModel, table: FeatureTable,
                       target: str) -> tuple[DesignMatrix, dict]:
    """Replay the recipe. target 'neural' fully imputes; target 'gbdt' keeps
    continuous missing cells as NaN for the boosting learner to route.

    Returns the design matrix and an audit dict (unseen-category counts).
    """
    if target not in ("neural", "gbdt"):
        raise ConfigError(f"unknown design-matrix target '{target}'")
    have = {c.name for c in table.columns}
    for name in model.retained_order:
        if name not in have:
            raise DataError(f"table is missing required column '{name}'")
    if model.strata_column is not None and model.strata_column not in have:
        raise DataError(f"table is missing strata column '{model.strata_column}'")

    n = table.n_rows
    blocks: list[np.ndarray] = []
    audit: dict[str, dict[str, int]] = {"unseen_categories": {}}
    strata = (table.data[model.strata_column]
              if model.strata_column is not None else None)

    for name in model.retained_order:
        col = table.data[name]
        miss = table.missing_mask(name)
        if name in model.continuous:
            stats = model.continuous[name]
            out = col.astype(np.float64).copy()
            if target == "neural":
                fill = np.full(n, stats["median"])
                if strata is not None and "strata_medians" in stats:
                    per = stats["strata_medians"]
                    for i in np.nonzero(miss)[0]:
                        key = str(strata[i])
                        fill[i] = per.get(key, stats["median"])
                out[miss] = fill[miss]
            out = (out - stats["mean"]) / stats["std"]   # NaNs stay NaN for gbdt
            blocks.append(out[:, None])
        elif name in model.binary:
            out = col.astype(np.float64).copy()
            out[miss] = model.binary[name]["mode"]
            blocks.append(out[:, None])
        else:
            info = model.categorical[name]
            vocab: list[str] = info["vocab"]
            index = {v: i for i, v in enumerate(vocab)}
            block = np.zeros((n, len(vocab)))
            unseen = 0
            for i, v in enumerate(col):
                if v is None:
                    v = info["mode"]
                v = str(v)
                if v in index:
                    block[i, index[v]] = 1.0
                else:
                    unseen += 1                      # unseen: all-zero block
            if unseen:
                audit["unseen_categories"][name] = unseen
                log.info("column '%s': %d unseen categories encoded as zeros",
                         name, unseen)
            blocks.append(block)

    for name in model.indicator_columns:
        blocks.append(table.missing_mask(name).astype(np.float64)[:, None])

    values = np.hstack(blocks) if blocks else np.zeros((n, 0))
    return DesignMatrix(values=values, feature_names=list(model.output_columns),
                        row_ids=list(table.row_ids)), audit
