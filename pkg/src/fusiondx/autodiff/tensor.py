"""Dense float64 tensor with an optional gradient buffer."""

from __future__ import annotations

import numpy as np

from ..errors import GraphError


class Tensor:
    """A named parameter or value: contiguous float64 values plus optional grad.

    The invariants are cheap and always enforced: grad, when present, has the
    same shape as values.
    """

    __slots__ = ("values", "grad")

    def __init__(self, values: np.ndarray, grad: np.ndarray | None = None):
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        if grad is not None:
            grad = np.ascontiguousarray(grad, dtype=np.float64)
            if grad.shape != self.values.shape:
                raise GraphError(
                    f"grad shape {grad.shape} != value shape {self.values.shape}"
                )
        self.grad = grad

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.values)

    def copy(self) -> "Tensor":
        return Tensor(self.values.copy(), None if self.grad is None else self.grad.copy())

    def __repr__(self) -> str:
        return f"Tensor(shape={self.values.shape})"
