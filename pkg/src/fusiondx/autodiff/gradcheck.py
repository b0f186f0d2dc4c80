"""Central finite-difference verification of the backward pass."""

from __future__ import annotations

import numpy as np

from ..errors import GraphError
from ..rng import stream
from .graph import ModelGraph


def grad_check(graph: ModelGraph, inputs: dict, targets: dict,
               epsilon: float = 1e-5, samples: int = 120, seed: int = 0,
               rtol: float = 1e-4, floor: float = 1e-6) -> float:
    """Max relative error between backward and central differences.

    Samples at least `samples` parameter coordinates (all of them when the
    model is smaller). A returned value <= rtol means every sampled coordinate
    satisfied |analytic - numeric| <= max(rtol * magnitude, floor); the floor
    keeps vanishing gradients from inflating the ratio.
    """
    if not 0.0 < epsilon <= 1e-3:
        raise GraphError(f"epsilon must be in (0, 1e-3], got {epsilon}")
    if graph.loss_node is None:
        raise GraphError("grad_check needs a graph with a scalar loss node")

    fwd_seed = int(stream(seed, "gradcheck-mask").integers(2**31))
    cache = graph.forward(inputs, mode="train", seed=fwd_seed, targets=targets)
    analytic = graph.backward(cache)

    names = sorted(graph.params)
    sizes = np.array([graph.params[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rng = stream(seed, "gradcheck-pick")
    count = min(total, max(samples, 1))
    flat_picks = np.sort(rng.choice(total, size=count, replace=False))

    def loss_at() -> float:
        c = graph.forward(inputs, mode="train", seed=fwd_seed, targets=targets)
        return float(c.activations[graph.loss_node])

    worst = 0.0
    for flat in flat_picks:
        which = int(np.searchsorted(offsets, flat, side="right") - 1)
        name = names[which]
        idx = np.unravel_index(int(flat - offsets[which]), graph.params[name].shape)
        values = graph.params[name].values
        keep = values[idx]
        values[idx] = keep + epsilon
        up = loss_at()
        values[idx] = keep - epsilon
        down = loss_at()
        values[idx] = keep
        numeric = (up - down) / (2.0 * epsilon)
        a = analytic[name][idx]
        denom = max(abs(a), abs(numeric), floor / rtol)
        worst = max(worst, abs(a - numeric) / denom)
    return worst
