"""Dot-annotation parsing.

Documents are JSON objects keyed by class name, each holding a list of
{"x": ..., "y": ...} points in normalized [0, 1] image coordinates. Recognized
keys map onto the three model classes; anything else (apoptosis, tubule, ...)
is skipped and counted.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from ..errors import DataError

log = logging.getLogger(__name__)

# class ids: mitosis is class 0 (the clinically critical minority), then
# non-tumour, then tumour
CLASS_NAMES = ("mitosis", "non_tumour", "tumour")
KEY_ALIASES = {
    "mitosis": "mitosis",
    "tumour": "tumour",
    "tumor": "tumour",
    "non_tumour": "non_tumour",
    "non_tumor": "non_tumour",
}


def class_id(label: str) -> int:
    return CLASS_NAMES.index(label)


@dataclass(frozen=True)
class AnnotationRecord:
    label: str
    x: float
    y: float


@dataclass
class AnnotationSet:
    image_id: str
    width: int
    height: int
    records: list[AnnotationRecord] = field(default_factory=list)
    skipped: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise DataError("image extents must be positive")

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in CLASS_NAMES}
        for rec in self.records:
            counts[rec.label] += 1
        return counts

    def to_json(self) -> str:
        doc: dict = {name: [] for name in CLASS_NAMES}
        for rec in self.records:
            doc[rec.label].append({"x": rec.x, "y": rec.y})
        return json.dumps({"image_id": self.image_id, "width": self.width,
                           "height": self.height, **doc}, sort_keys=True)


def parse_annotations(document: str, image_id: str, width: int,
                      height: int) -> AnnotationSet:
    """Parse one annotation document for an image of the given extents."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed annotation document at position {exc.pos}: "
                        f"{exc.msg}") from exc
    if not isinstance(doc, dict):
        raise DataError("annotation document must be a JSON object")

    out = AnnotationSet(image_id=image_id, width=width, height=height)
    for key, points in doc.items():
        if key in ("image_id", "width", "height"):
            continue
        label = KEY_ALIASES.get(key)
        if label is None:
            count = len(points) if isinstance(points, list) else 1
            out.skipped[key] = out.skipped.get(key, 0) + count
            log.warning("annotation key '%s': skipped %d points", key, count)
            continue
        if not isinstance(points, list):
            raise DataError(f"class '{key}' must hold a list of points")
        for i, point in enumerate(points):
            try:
                x, y = float(point["x"]), float(point["y"])
            except (TypeError, KeyError) as exc:
                raise DataError(f"class '{key}' record {i}: needs x and y") from exc
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise DataError(
                    f"class '{key}' record {i}: coordinate outside [0, 1]"
                )
            out.records.append(AnnotationRecord(label=label, x=x, y=y))
    return out
