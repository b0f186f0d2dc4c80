"""Window extraction around annotated points and patch normalization.

Normalized coordinates map to pixels as round(x * (W - 1)); windows center on
that pixel and are clamped (shifted inward) when they would leave the image,
so edge annotations keep their patches instead of being dropped or padded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError
from .annotations import CLASS_NAMES, AnnotationSet

PATCH_SIZE = 64


@dataclass
class PatchEntry:
    patch_id: str
    image_id: str
    label: str
    row: int
    col: int
    split: str = "unassigned"


@dataclass
class PatchManifest:
    entries: list[PatchEntry] = field(default_factory=list)
    patch_size: int = PATCH_SIZE

    def __post_init__(self):
        ids = [e.patch_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate patch ids in manifest")

    def class_counts(self) -> dict[str, int]:
        counts = {name: 0 for name in CLASS_NAMES}
        for e in self.entries:
            counts[e.label] += 1
        return counts

    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    def to_json(self, path: str | Path) -> None:
        doc = {
            "patch_size": self.patch_size,
            "class_counts": self.class_counts(),
            "entries": [
                {"patch_id": e.patch_id, "image_id": e.image_id,
                 "label": e.label, "row": e.row, "col": e.col, "split": e.split}
                for e in self.entries
            ],
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "PatchManifest":
        doc = json.loads(Path(path).read_text())
        return cls(
            entries=[PatchEntry(**e) for e in doc["entries"]],
            patch_size=doc["patch_size"],
        )


def extract_patches(image: np.ndarray, annotations: AnnotationSet,
                    size: int = PATCH_SIZE) -> tuple[np.ndarray, list[PatchEntry]]:
    """One patch per annotation record; returns (N, size, size, 3) uint8 plus
    manifest entries recording the clamped window origins."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise DataError("image must be (H, W, 3) uint8")
    h, w = image.shape[:2]
    if annotations.height != h or annotations.width != w:
        raise DataError(
            f"annotation extents {annotations.width}x{annotations.height} do not "
            f"match image {w}x{h}"
        )
    if h < size or w < size:
        raise DataError(f"image {w}x{h} smaller than the {size}-pixel window")

    half = size // 2
    patches = np.empty((len(annotations.records), size, size, 3), dtype=np.uint8)
    entries = []
    for i, rec in enumerate(annotations.records):
        center_col = int(np.round(rec.x * (w - 1)))
        center_row = int(np.round(rec.y * (h - 1)))
        row = min(max(center_row - half, 0), h - size)
        col = min(max(center_col - half, 0), w - size)
        patches[i] = image[row : row + size, col : col + size]
        entries.append(PatchEntry(
            patch_id=f"{annotations.image_id}:{i:05d}",
            image_id=annotations.image_id,
            label=rec.label, row=row, col=col,
        ))
    return patches, entries


def normalize_patch(patch: np.ndarray) -> np.ndarray:
    """(64, 64, 3) uint8 -> channel-major float64 in [0, 1] (divide by 255)."""
    if patch.shape != (PATCH_SIZE, PATCH_SIZE, 3) or patch.dtype != np.uint8:
        raise DataError(
            f"expected ({PATCH_SIZE}, {PATCH_SIZE}, 3) uint8, got "
            f"{patch.shape} {patch.dtype}"
        )
    return patch.astype(np.float64).transpose(2, 0, 1) / 255.0
