"""Versioned binary checkpoint container.

Layout: magic, format version, little-endian u64 header length, UTF-8 JSON
header (graph topology, attrs, tensor directory, optimizer scalars), then the
raw little-endian float64 buffers in directory order. Loading restores values
bit-exactly, so save -> load -> save produces identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .graph import GraphNode, ModelGraph
from .optim import AdamState

MAGIC = b"FDXC"
VERSION = 1


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def save_checkpoint(path: str | Path, graph: ModelGraph,
                    optimizer: AdamState | None = None) -> None:
    buffers: list[np.ndarray] = []
    directory = []

    def register(kind: str, name: str, arr: np.ndarray):
        directory.append({"kind": kind, "name": name, "shape": list(arr.shape)})
        buffers.append(np.ascontiguousarray(arr, dtype="<f8"))

    for name in sorted(graph.params):
        register("param", name, graph.params[name].values)
    for name in sorted(graph.state):
        register("state", name, graph.state[name])

    opt = None
    if optimizer is not None:
        opt = {
            "lr": optimizer.lr, "beta1": optimizer.beta1, "beta2": optimizer.beta2,
            "epsilon": optimizer.epsilon, "weight_decay": optimizer.weight_decay,
            "t": optimizer.t,
        }
        for name in sorted(optimizer.m):
            register("adam_m", name, optimizer.m[name])
        for name in sorted(optimizer.v):
            register("adam_v", name, optimizer.v[name])

    header = {
        "version": VERSION,
        "nodes": [
            {"name": n.name, "op": n.op, "inputs": list(n.inputs),
             "params": list(n.params), "attrs": _jsonable(n.attrs)}
            for n in graph.nodes
        ],
        "meta": _jsonable(graph.meta),
        "tensors": directory,
        "optimizer": opt,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HQ", VERSION, len(blob)))
        fh.write(blob)
        for arr in buffers:
            fh.write(arr.tobytes())
    tmp.replace(path)


def load_checkpoint(path: str | Path) -> tuple[ModelGraph, AdamState | None]:
    path = Path(path)
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise DataError(f"{path}: not a checkpoint file")
        version, hlen = struct.unpack("<HQ", fh.read(10))
        if version != VERSION:
            raise DataError(f"{path}: unsupported checkpoint version {version}")
        header = json.loads(fh.read(hlen).decode("utf-8"))
        payload = fh.read()

    graph = ModelGraph()
    tensors: dict[tuple[str, str], np.ndarray] = {}
    offset = 0
    for entry in header["tensors"]:
        n = int(np.prod(entry["shape"])) if entry["shape"] else 1
        raw = np.frombuffer(payload, dtype="<f8", count=n, offset=offset)
        offset += n * 8
        tensors[(entry["kind"], entry["name"])] = raw.reshape(entry["shape"]).copy()

    for (kind, name), arr in tensors.items():
        if kind == "param":
            graph.add_param(name, arr)
    for spec in header["nodes"]:
        graph.nodes.append(GraphNode(spec["name"], spec["op"],
                                     tuple(spec["inputs"]), tuple(spec["params"]),
                                     dict(spec["attrs"])))
        graph._by_name[spec["name"]] = graph.nodes[-1]
    for (kind, name), arr in tensors.items():
        if kind == "state":
            graph.state[name] = arr
    graph.meta = dict(header.get("meta") or {})

    optimizer = None
    if header.get("optimizer") is not None:
        o = header["optimizer"]
        optimizer = AdamState(lr=o["lr"], beta1=o["beta1"], beta2=o["beta2"],
                              epsilon=o["epsilon"], weight_decay=o["weight_decay"],
                              t=o["t"])
        for (kind, name), arr in tensors.items():
            if kind == "adam_m":
                optimizer.m[name] = arr
            elif kind == "adam_v":
                optimizer.v[name] = arr
    return graph, optimizer
