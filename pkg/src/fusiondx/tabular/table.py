"""Heterogeneous clinical feature tables with explicit missingness.

Continuous and binary columns are float64 with NaN as the missing marker;
categorical columns are object arrays with None. CSV input uses an empty cell
or the literal "NA" as missing, with a sidecar JSON schema declaring column
kinds, the row-id column, and the optional label column.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataError

KINDS = ("continuous", "categorical", "binary")
MISSING_TOKENS = ("", "NA")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"column '{self.name}': unknown kind '{self.kind}'")


@dataclass
class FeatureTable:
    row_ids: list[str]
    columns: list[ColumnSpec]
    data: dict[str, np.ndarray]
    labels: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.row_ids)
        if len(set(self.row_ids)) != n:
            raise DataError("row ids must be unique")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        for c in self.columns:
            if c.name not in self.data:
                raise DataError(f"column '{c.name}' has no data")
            if len(self.data[c.name]) != n:
                raise DataError(f"column '{c.name}' is not rectangular")
        if self.labels is not None and len(self.labels) != n:
            raise DataError("labels length mismatch")

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    def kind_of(self, name: str) -> str:
        for c in self.columns:
            if c.name == name:
                return c.kind
        raise DataError(f"unknown column '{name}'")

    def missing_mask(self, name: str) -> np.ndarray:
        col = self.data[name]
        if self.kind_of(name) == "categorical":
            return np.array([v is None for v in col])
        return np.isnan(col)

    def subset(self, row_index: np.ndarray) -> "FeatureTable":
        """Row-filtered copy (used to fit on the training split only)."""
        row_index = np.asarray(row_index)
        return FeatureTable(
            row_ids=[self.row_ids[i] for i in row_index],
            columns=list(self.columns),
            data={k: v[row_index] for k, v in self.data.items()},
            labels=None if self.labels is None else self.labels[row_index],
        )


def load_table(csv_path: str | Path, schema_path: str | Path) -> FeatureTable:
    schema = json.loads(Path(schema_path).read_text())
    id_col = schema.get("id_column", "row_id")
    label_col = schema.get("label_column")
    kinds: dict[str, str] = schema["columns"]

    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{csv_path}: empty CSV")
        rows = list(reader)
    for needed in [id_col] + list(kinds):
        if needed not in (reader.fieldnames or []):
            raise DataError(f"{csv_path}: missing column '{needed}'")

    row_ids = [r[id_col] for r in rows]
    columns = [ColumnSpec(name, kind) for name, kind in kinds.items()]
    data: dict[str, np.ndarray] = {}
    for spec in columns:
        raw = [r[spec.name] for r in rows]
        if spec.kind == "categorical":
            data[spec.name] = np.array(
                [None if v in MISSING_TOKENS else v for v in raw], dtype=object
            )
        else:
            out = np.empty(len(raw))
            for i, v in enumerate(raw):
                if v in MISSING_TOKENS:
                    out[i] = np.nan
                else:
                    try:
                        out[i] = float(v)
                    except ValueError as exc:
                        raise DataError(
                            f"{csv_path}: row {i} column '{spec.name}': "
                            f"not a number: {v!r}"
                        ) from exc
            data[spec.name] = out

    labels = None
    if label_col is not None:
        labels = np.array([float(r[label_col]) for r in rows])
    return FeatureTable(row_ids=row_ids, columns=columns, data=data, labels=labels)


def save_table(csv_path: str | Path, schema_path: str | Path,
               table: FeatureTable, label_name: str = "label",
               id_name: str = "row_id") -> None:
    header = [id_name] + [c.name for c in table.columns]
    if table.labels is not None:
        header.append(label_name)
    lines = [",".join(header)]
    for i, rid in enumerate(table.row_ids):
        cells = [rid]
        for c in table.columns:
            v = table.data[c.name][i]
            if c.kind == "categorical":
                cells.append("NA" if v is None else str(v))
            else:
                cells.append("NA" if np.isnan(v) else repr(float(v)))
        if table.labels is not None:
            cells.append(repr(float(table.labels[i])))
        lines.append(",".join(cells))
    Path(csv_path).write_text("\n".join(lines) + "\n")
    schema = {
        "id_column": id_name,
        "label_column": label_name if table.labels is not None else None,
        "columns": {c.name: c.kind for c in table.columns},
    }
    Path(schema_path).write_text(json.dumps(schema, sort_keys=True, indent=2) + "\n")
