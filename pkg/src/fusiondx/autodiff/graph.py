"""Static layered computation graph with reverse-mode differentiation.

A ModelGraph is a DAG of named GraphNodes over a parameter store. Nodes are
appended in topological order (inputs must already exist), forward evaluates
every node, backward walks the reverse order and accumulates parameter and
activation gradients.

Train/eval mode switches dropout (mask vs identity) and batchnorm (batch vs
running statistics); eval forwards are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import GraphError
from ..rng import stream
from . import ops
from .tensor import Tensor

LOSS_OPS = ("softmax_ce", "bce_logit")
OP_KINDS = (
    "input", "conv2d", "maxpool2", "relu", "affine", "batchnorm",
    "dropout", "flatten", "concat",
) + LOSS_OPS


@dataclass(frozen=True)
class GraphNode:
    """One operation: op kind, input node names, parameter names, attributes."""
    name: str
    op: str
    inputs: tuple[str, ...] = ()
    params: tuple[str, ...] = ()
    attrs: dict[str, Any] = field(default_factory=dict)


@dataclass
class ForwardCache:
    """Everything forward produced: per-node activations plus backward stashes."""
    mode: str
    seed: int
    activations: dict[str, np.ndarray | float]
    op_caches: dict[str, Any]
    node_grads: dict[str, np.ndarray] = field(default_factory=dict)


class ModelGraph:
    """Mutable while being built; treat as frozen once training starts."""

    def __init__(self):
        self.nodes: list[GraphNode] = []
        self._by_name: dict[str, GraphNode] = {}
        self.params: dict[str, Tensor] = {}
        self.state: dict[str, np.ndarray] = {}
        self.meta: dict[str, Any] = {}

    # -- construction -------------------------------------------------------

    def add_input(self, name: str, shape: tuple[int | None, ...]) -> str:
        return self.add(name, "input", attrs={"shape": list(shape)})

    def add(self, name: str, op: str, inputs: tuple[str, ...] = (),
            params: tuple[str, ...] = (), attrs: dict | None = None) -> str:
        if op not in OP_KINDS:
            raise GraphError(f"unknown op kind '{op}'")
        if name in self._by_name:
            raise GraphError(f"duplicate node name '{name}'")
        for inp in inputs:
            if inp not in self._by_name:
                raise GraphError(f"node '{name}' references unknown input '{inp}'")
        if op in LOSS_OPS and self.loss_node is not None:
            raise GraphError("graph already has a loss node")
        node = GraphNode(name, op, tuple(inputs), tuple(params), dict(attrs or {}))
        self.nodes.append(node)
        self._by_name[name] = node
        if op == "batchnorm":
            width = self.params[node.params[0]].size
            self.state[f"{name}.running_mean"] = np.zeros(width)
            self.state[f"{name}.running_var"] = np.ones(width)
        return name

    def add_param(self, name: str, values: np.ndarray) -> str:
        if name in self.params:
            raise GraphError(f"duplicate parameter '{name}'")
        self.params[name] = Tensor(values)
        return name

    @property
    def loss_node(self) -> str | None:
        for node in self.nodes:
            if node.op in LOSS_OPS:
                return node.name
        return None

    @property
    def input_names(self) -> list[str]:
        return [n.name for n in self.nodes if n.op == "input"]

    def node(self, name: str) -> GraphNode:
        if name not in self._by_name:
            raise GraphError(f"unknown node '{name}'")
        return self._by_name[name]

    def parameter_count(self) -> int:
        return sum(t.size for t in self.params.values())

    # -- execution ----------------------------------------------------------

    def forward(self, inputs: dict[str, np.ndarray], mode: str = "train",
                seed: int = 0, targets: dict[str, np.ndarray] | None = None) -> ForwardCache:
        """Evaluate every node. `targets` feeds loss nodes; optional in eval mode."""
        if mode not in ("train", "eval"):
            raise GraphError(f"mode must be train or eval, got '{mode}'")
        targets = targets or {}
        acts: dict[str, np.ndarray | float] = {}
        caches: dict[str, Any] = {}
        for node in self.nodes:
            try:
                acts[node.name], caches[node.name] = self._run_node(
                    node, acts, inputs, targets, mode, seed
                )
            except GraphError:
                raise
            except KeyError as exc:
                raise GraphError(f"node '{node.name}': missing input {exc}") from exc
        return ForwardCache(mode=mode, seed=seed, activations=acts, op_caches=caches)

    def _run_node(self, node, acts, inputs, targets, mode, seed):
        op = node.op
        if op == "input":
            if node.name not in inputs:
                raise GraphError(f"missing graph input '{node.name}'")
            x = np.asarray(inputs[node.name], dtype=np.float64)
            want = node.attrs.get("shape")
            if want is not None:
                got = list(x.shape)
                if len(got) != len(want) or any(
                    w is not None and w != g for w, g in zip(want, got)
                ):
                    raise GraphError(
                        f"input '{node.name}' shape {got} does not match {want}"
                    )
            ops.check_finite(node.name, x)
            return x, None
        if op in LOSS_OPS:
            key = node.attrs.get("target_key", "targets")
            if key not in targets:
                if mode == "eval":
                    return np.nan, None
                raise GraphError(f"loss node '{node.name}' needs targets['{key}']")
            logits = acts[node.inputs[0]]
            if op == "softmax_ce":
                cw = node.attrs.get("class_weights")
                cw = None if cw is None else np.asarray(cw, dtype=np.float64)
                return ops.softmax_ce_forward(logits, np.asarray(targets[key]), cw)
            return ops.bce_logit_forward(
                logits, targets[key], node.attrs.get("pos_weight")
            )

        xs = [acts[i] for i in node.inputs]
        try:
            if op == "conv2d":
                kern, bias = (self.params[p].values for p in node.params)
                return ops.conv2d_forward(xs[0], kern, bias,
                                          node.attrs.get("stride", 1),
                                          node.attrs.get("padding", 1))
            if op == "maxpool2":
                return ops.maxpool2_forward(xs[0])
            if op == "relu":
                return ops.relu_forward(xs[0])
            if op == "affine":
                w, b = (self.params[p].values for p in node.params)
                return ops.affine_forward(xs[0], w, b)
            if op == "batchnorm":
                scale, shift = (self.params[p].values for p in node.params)
                return ops.batchnorm_forward(
                    xs[0], scale, shift,
                    self.state[f"{node.name}.running_mean"],
                    self.state[f"{node.name}.running_var"],
                    mode, node.attrs.get("eps", 1e-5),
                    node.attrs.get("momentum", 0.1),
                )
            if op == "dropout":
                rng = stream(seed, "dropout", node.name)
                return ops.dropout_forward(xs[0], node.attrs["rate"], mode, rng)
            if op == "flatten":
                return ops.flatten_forward(xs[0])
            if op == "concat":
                return ops.concat_forward(xs)
        except GraphError as exc:
            raise GraphError(f"node '{node.name}': {exc}") from exc
        raise GraphError(f"unhandled op '{op}'")

    def backward(self, cache: ForwardCache, wrt: str | None = None,
                 seed_grad: np.ndarray | float | None = None) -> dict[str, np.ndarray]:
        """Accumulate gradients from `wrt` (default: the loss node).

        Every parameter gets a gradient buffer; parameters the differentiated
        node does not reach keep zeros. Returns the per-parameter gradients and
        stores per-node activation gradients on the cache (used by Grad-CAM).
        """
        if not isinstance(cache, ForwardCache):
            raise GraphError("backward requires the cache returned by forward")
        if wrt is None:
            wrt = self.loss_node
            if wrt is None:
                raise GraphError("graph has no loss node to differentiate")
            if cache.mode != "train":
                raise GraphError("loss backward requires a train-mode forward")
            seed_grad = 1.0
        if wrt not in cache.activations:
            raise GraphError(f"backward target '{wrt}' was not run in this forward")
        if seed_grad is None:
            raise GraphError("backward from a non-loss node needs seed_grad")

        for tensor in self.params.values():
            tensor.zero_grad()
        node_grads: dict[str, np.ndarray] = {
            wrt: np.asarray(seed_grad, dtype=np.float64)
        }
        start = next(i for i, n in enumerate(self.nodes) if n.name == wrt)
        for node in reversed(self.nodes[: start + 1]):
            if node.name not in node_grads or node.op == "input":
                continue
            gout = node_grads.pop(node.name)
            gins, pgrads = self._grad_node(node, gout, cache)
            for inp, g in zip(node.inputs, gins):
                if inp in node_grads:
                    node_grads[inp] = node_grads[inp] + g
                else:
                    node_grads[inp] = g
                cache.node_grads[inp] = node_grads[inp]
            for pname, g in zip(node.params, pgrads):
                self.params[pname].grad += g
        return {name: t.grad.copy() for name, t in self.params.items()}

    def _grad_node(self, node, gout, cache):
        op = node.op
        opcache = cache.op_caches[node.name]
        if op == "softmax_ce":
            if opcache is None:
                raise GraphError(f"loss '{node.name}' was skipped in forward")
            return [ops.softmax_ce_backward(float(gout), opcache)], []
        if op == "bce_logit":
            if opcache is None:
                raise GraphError(f"loss '{node.name}' was skipped in forward")
            return [ops.bce_logit_backward(float(gout), opcache)], []
        if op == "conv2d":
            kern = self.params[node.params[0]].values
            gx, gk, gb = ops.conv2d_backward(gout, kern, opcache)
            return [gx], [gk, gb]
        if op == "maxpool2":
            return [ops.maxpool2_backward(gout, opcache)], []
        if op == "relu":
            return [ops.relu_backward(gout, opcache)], []
        if op == "affine":
            w = self.params[node.params[0]].values
            gx, gw, gb = ops.affine_backward(gout, w, opcache)
            return [gx], [gw, gb]
        if op == "batchnorm":
            scale = self.params[node.params[0]].values
            gx, gscale, gshift = ops.batchnorm_backward(gout, scale, opcache)
            return [gx], [gscale, gshift]
        if op == "dropout":
            return [ops.dropout_backward(gout, opcache)], []
        if op == "flatten":
            return [ops.flatten_backward(gout, opcache)], []
        if op == "concat":
            return ops.concat_backward(gout, opcache), []
        raise GraphError(f"unhandled op '{op}' in backward")

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> dict:
        """Deep copy of parameters and state; restore() puts them back."""
        return {
            "params": {k: t.values.copy() for k, t in self.params.items()},
            "state": {k: v.copy() for k, v in self.state.items()},
        }

    def restore(self, snap: dict) -> None:
        for k, v in snap["params"].items():
            self.params[k].values[...] = v
        for k, v in snap["state"].items():
            self.state[k][...] = v
