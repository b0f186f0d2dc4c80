"""Minimal dense-tensor reverse-mode autodiff with the layer vocabulary the
pipeline's networks need, plus Adam and a finite-difference gradient checker."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .graph import ForwardCache, GraphNode, ModelGraph
from .ops import conv2d, maxpool2, softmax, softmax_cross_entropy
from .optim import AdamState, adam_step
from .tensor import Tensor

__all__ = [
    "AdamState", "ForwardCache", "GraphNode", "ModelGraph", "Tensor",
    "adam_step", "conv2d", "grad_check", "load_checkpoint", "maxpool2",
    "save_checkpoint", "softmax", "softmax_cross_entropy",
]
