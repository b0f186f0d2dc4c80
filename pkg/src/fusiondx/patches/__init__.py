"""Patch pipeline: annotations, window extraction, normalization,
augmentation, synthetic slides, disk formats."""

from .annotations import (
    CLASS_NAMES, AnnotationRecord, AnnotationSet, class_id, parse_annotations,
)
from .augment import AugmentConfig, augment, rotate_nearest
from .extract import (
    PATCH_SIZE, PatchEntry, PatchManifest, extract_patches, normalize_patch,
)
from .io import (
    load_patch_tree, load_png, patch_path, save_patch_tree, save_png,
    write_class_audit,
)
from .synth import BASE_PARAMS, SlideSpec, class_render_params, synth_slides

__all__ = [
    "AnnotationRecord", "AnnotationSet", "AugmentConfig", "BASE_PARAMS",
    "CLASS_NAMES", "PATCH_SIZE", "PatchEntry", "PatchManifest", "SlideSpec",
    "augment", "class_id", "class_render_params", "extract_patches",
    "load_patch_tree", "load_png", "normalize_patch", "parse_annotations",
    "patch_path", "rotate_nearest", "save_patch_tree", "save_png",
    "synth_slides", "write_class_audit",
]
