"""Disk formats for the patch pipeline: PNG rasters, class-named patch
directories, and the class-distribution audit CSV."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError, MissingArtifactError
from .annotations import CLASS_NAMES
from .extract import PatchEntry, PatchManifest


def save_png(path: str | Path, image: np.ndarray) -> None:
    if image.dtype != np.uint8:
        raise DataError("PNG output expects uint8 pixels")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(image).save(str(path), format="PNG")


def load_png(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(str(path))
    return np.asarray(Image.open(path).convert("RGB"))


def patch_path(root: str | Path, entry: PatchEntry) -> Path:
    safe = entry.patch_id.replace(":", "_")
    return Path(root) / entry.label / f"{safe}.png"


def save_patch_tree(root: str | Path, patches: np.ndarray,
                    manifest: PatchManifest) -> None:
    """Write patches into class-named folders mirroring the manifest order."""
    for patch, entry in zip(patches, manifest.entries):
        save_png(patch_path(root, entry), patch)


def load_patch_tree(root: str | Path, manifest: PatchManifest) -> np.ndarray:
    out = np.empty((len(manifest.entries), manifest.patch_size,
                    manifest.patch_size, 3), dtype=np.uint8)
    for i, entry in enumerate(manifest.entries):
        out[i] = load_png(patch_path(root, entry))
    return out


def write_class_audit(path: str | Path, manifest: PatchManifest) -> None:
    counts = manifest.class_counts()
    total = max(sum(counts.values()), 1)
    lines = ["class,count,fraction"]
    for name in CLASS_NAMES:
        lines.append(f"{name},{counts[name]},{counts[name] / total!r}")
    Path(path).write_text("\n".join(lines) + "\n")
