"""Synthetic stained-tissue slides with dot annotations.

Each class renders as a distinct parametric blob on a textured background:
tumour as large dark disks, non-tumour as small pale disks, mitosis as a dark
bipolar figure. The difficulty knob blends the mitosis morphology toward the
non-tumour one (the clinically confusable pair), drifts tumour mildly toward
the middle, and widens per-blob parameter jitter, so class overlap grows
smoothly from trivially separable at 0 to indistinguishable at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..rng import stream
from .annotations import AnnotationRecord, AnnotationSet

BACKGROUND = np.array([232.0, 213.0, 226.0])
BASE_PARAMS = {
    "tumour": {"radius": 9.0, "color": np.array([98.0, 62.0, 135.0]), "sep": 0.0},
    "non_tumour": {"radius": 4.5, "color": np.array([186.0, 160.0, 195.0]), "sep": 0.0},
    "mitosis": {"radius": 3.2, "color": np.array([60.0, 40.0, 80.0]), "sep": 7.0},
}


@dataclass(frozen=True)
class SlideSpec:
    n_tumour: int
    n_non_tumour: int
    n_mitosis: int
    width: int = 384
    height: int = 384
    per_slide: int = 48
    difficulty: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if min(self.n_tumour, self.n_non_tumour, self.n_mitosis) < 0:
            raise ConfigError("class counts must be nonnegative")
        if not 0.0 <= self.difficulty <= 1.0:
            raise ConfigError("difficulty must be in [0, 1]")


def class_render_params(difficulty: float) -> dict[str, dict]:
    """Effective per-class blob parameters at a difficulty level."""
    nt = BASE_PARAMS["non_tumour"]
    out = {}
    for name, base in BASE_PARAMS.items():
        if name == "mitosis":
            blend = min(1.0, 1.15 * difficulty)
        elif name == "tumour":
            blend = 0.35 * difficulty
        else:
            blend = 0.0
        out[name] = {
            "radius": (1 - blend) * base["radius"] + blend * nt["radius"],
            "color": (1 - blend) * base["color"] + blend * nt["color"],
            "sep": (1 - blend) * base["sep"],
            "radius_jitter": 0.06 + 0.22 * difficulty,
            "color_jitter": 4.0 + 26.0 * difficulty,
        }
    return out


def _textured_background(rng, h: int, w: int) -> np.ndarray:
    img = np.tile(BACKGROUND, (h, w, 1))
    coarse = rng.normal(0.0, 8.0, size=(h // 32 + 2, w // 32 + 2, 1))
    ys = np.linspace(0, coarse.shape[0] - 1.001, h)
    xs = np.linspace(0, coarse.shape[1] - 1.001, w)
    y0, x0 = ys.astype(int), xs.astype(int)
    fy, fx = (ys - y0)[:, None, None], (xs - x0)[None, :, None]
    field = ((1 - fy) * (1 - fx) * coarse[y0][:, x0]
             + (1 - fy) * fx * coarse[y0][:, x0 + 1]
             + fy * (1 - fx) * coarse[y0 + 1][:, x0]
             + fy * fx * coarse[y0 + 1][:, x0 + 1])
    img += field
    img += rng.normal(0.0, 5.0, size=(h, w, 1))
    return img


def _paint_disk(img: np.ndarray, row: float, col: float, radius: float,
                color: np.ndarray) -> None:
    h, w = img.shape[:2]
    r0 = max(int(row - radius - 2), 0)
    r1 = min(int(row + radius + 3), h)
    c0 = max(int(col - radius - 2), 0)
    c1 = min(int(col + radius + 3), w)
    rows, cols = np.mgrid[r0:r1, c0:c1]
    dist = np.sqrt((rows - row) ** 2 + (cols - col) ** 2)
    alpha = np.clip((radius - dist) / 1.5 + 0.5, 0.0, 1.0)[:, :, None]
    img[r0:r1, c0:c1] = alpha * color + (1 - alpha) * img[r0:r1, c0:c1]


def _place_centers(rng, count: int, h: int, w: int, min_sep: float) -> list:
    centers: list[tuple[float, float]] = []
    margin = 8
    for _ in range(count):
        for _attempt in range(120):
            r = rng.uniform(margin, h - 1 - margin)
            c = rng.uniform(margin, w - 1 - margin)
            if all((r - rr) ** 2 + (c - cc) ** 2 >= min_sep**2
                   for rr, cc in centers[-80:]):
                break
        centers.append((r, c))
    return centers


def synth_slides(spec: SlideSpec) -> list[tuple[np.ndarray, AnnotationSet]]:
    """Render slides and matching annotation sets (blob centers)."""
    labels = (["tumour"] * spec.n_tumour
              + ["non_tumour"] * spec.n_non_tumour
              + ["mitosis"] * spec.n_mitosis)
    order = stream(spec.seed, "slide-order").permutation(len(labels))
    labels = [labels[i] for i in order]
    params = class_render_params(spec.difficulty)

    slides = []
    n_slides = max(1, -(-len(labels) // spec.per_slide))
    for s in range(n_slides):
        chunk = labels[s * spec.per_slide : (s + 1) * spec.per_slide]
        rng = stream(spec.seed, "slide", s)
        img = _textured_background(rng, spec.height, spec.width)
        centers = _place_centers(rng, len(chunk), spec.height, spec.width,
                                 min_sep=20.0)
        records = []
        for label, (row, col) in zip(chunk, centers):
            p = params[label]
            radius = p["radius"] * (1.0 + rng.normal(0.0, p["radius_jitter"]))
            radius = max(1.5, radius)
            color = np.clip(p["color"] + rng.normal(0.0, p["color_jitter"], 3),
                            0, 255)
            sep = p["sep"]
            if sep > 0.5:
                phi = rng.uniform(0, 2 * np.pi)
                dr, dc = np.sin(phi) * sep / 2, np.cos(phi) * sep / 2
                _paint_disk(img, row - dr, col - dc, radius, color)
                _paint_disk(img, row + dr, col + dc, radius, color)
            else:
                _paint_disk(img, row, col, radius, color)
            records.append(AnnotationRecord(
                label=label,
                x=col / (spec.width - 1),
                y=row / (spec.height - 1),
            ))
        image_id = f"slide{s:04d}"
        ann = AnnotationSet(image_id=image_id, width=spec.width,
                            height=spec.height, records=records)
        slides.append((np.clip(img, 0, 255).astype(np.uint8), ann))
    return slides
