"""Adam with bias correction and decoupled weight decay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GraphError, NumericalError
from .tensor import Tensor


@dataclass
class AdamState:
    """Per-parameter moments plus the step counter and hyperparameters.

    Decay is applied after the Adam update (decoupled), so it never enters the
    moment estimates.
    """

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.lr <= 0:
            raise GraphError(f"learning rate must be positive, got {self.lr}")


def adam_step(params: dict[str, Tensor], grads: dict[str, np.ndarray],
              state: AdamState) -> None:
    """One optimizer step over all named parameters, in place."""
    state.t += 1
    t = state.t
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for name, tensor in params.items():
        g = grads[name]
        if g.shape != tensor.shape:
            raise GraphError(f"gradient shape mismatch for '{name}'")
        if not np.all(np.isfinite(g)):
            raise NumericalError(f"NaN/inf gradient for parameter '{name}'")
        if name not in state.m:
            state.m[name] = np.zeros_like(tensor.values)
            state.v[name] = np.zeros_like(tensor.values)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        update = (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)
        tensor.values -= state.lr * update
        if state.weight_decay:
            tensor.values -= state.lr * state.weight_decay * tensor.values
