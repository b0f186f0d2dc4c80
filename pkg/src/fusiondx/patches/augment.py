"""Training-time patch augmentation.

Order of operations: horizontal flip, vertical flip, rotation (nearest
neighbor, edge replicate), multiplicative brightness, contrast about the patch
mean, clamp to [0, 1]. All five draws happen on every call so the stream
position never depends on the config, and a fully zeroed config is the
bit-exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class AugmentConfig:
    p_hflip: float = 0.5
    p_vflip: float = 0.5
    rotation_deg: float = 15.0
    brightness: float = 0.1
    contrast: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_hflip <= 1.0 and 0.0 <= self.p_vflip <= 1.0):
            raise ConfigError("flip probabilities must be in [0, 1]")
        if not (0.0 <= self.brightness <= 0.5 and 0.0 <= self.contrast <= 0.5):
            raise ConfigError("jitter fractions must be in [0, 0.5]")
        if not 0.0 <= self.rotation_deg <= 180.0:
            raise ConfigError("rotation limit must be in [0, 180] degrees")


def rotate_nearest(patch: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate channel-major (C, H, W) about the center; nearest-neighbor
    sampling with edge replication."""
    if angle_deg == 0.0:
        return patch
    _, h, w = patch.shape
    theta = np.deg2rad(angle_deg)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rows, cols = np.mgrid[0:h, 0:w]
    dy, dx = rows - cy, cols - cx
    # inverse mapping: output pixel samples the input rotated by -angle
    src_r = np.round(cy + np.cos(theta) * dy + np.sin(theta) * dx).astype(np.int64)
    src_c = np.round(cx - np.sin(theta) * dy + np.cos(theta) * dx).astype(np.int64)
    np.clip(src_r, 0, h - 1, out=src_r)
    np.clip(src_c, 0, w - 1, out=src_c)
    return patch[:, src_r, src_c]


def augment(patch: np.ndarray, config: AugmentConfig,
            rng: np.random.Generator) -> np.ndarray:
    if patch.ndim != 3:
        raise ConfigError("augment expects a channel-major (C, H, W) patch")
    u_h = rng.random()
    u_v = rng.random()
    angle = rng.uniform(-config.rotation_deg, config.rotation_deg)
    b_factor = rng.uniform(1.0 - config.brightness, 1.0 + config.brightness)
    c_factor = rng.uniform(1.0 - config.contrast, 1.0 + config.contrast)

    out = patch
    if u_h < config.p_hflip:
        out = out[:, :, ::-1]
    if u_v < config.p_vflip:
        out = out[:, ::-1, :]
    out = rotate_nearest(out, angle)
    if b_factor != 1.0:
        out = out * b_factor
    if c_factor != 1.0:
        mean = out.mean()
        out = mean + (out - mean) * c_factor
    if out is patch:
        return patch.copy()
    return np.clip(out, 0.0, 1.0)
