"""Forward/backward implementations for the supported layer vocabulary.

Each `*_forward` returns (output, cache); the matching `*_backward` consumes
the upstream gradient and the cache. Image activations are batched
channel-major (B, C, H, W); convolution converts to channel-last scratch
internally because im2col matmuls with a wide inner dimension are the only
fast path on plain BLAS.

Public single-sample helpers (`conv2d`, `maxpool2`, `softmax_cross_entropy`)
accept unbatched CHW input as well.
"""

from __future__ import annotations

import numpy as np

from ..errors import GraphError, NumericalError


# ---------------------------------------------------------------------------
# convolution (3x3, stride 1, padding 1)
# ---------------------------------------------------------------------------

def _im2col(x_hwc: np.ndarray) -> np.ndarray:
    """(B, H, W, C) -> (B*H*W, 9*C) with tap-major inner layout."""
    b, h, w, c = x_hwc.shape
    xp = np.pad(x_hwc, ((0, 0), (1, 1), (1, 1), (0, 0)))
    cols = np.empty((b, h, w, 9, c))
    k = 0
    for i in range(3):
        for j in range(3):
            cols[:, :, :, k, :] = xp[:, i : i + h, j : j + w, :]
            k += 1
    return cols.reshape(b * h * w, 9 * c)


def _col2im(gcols: np.ndarray, b: int, h: int, w: int, c: int) -> np.ndarray:
    """Scatter-add (B*H*W, 9*C) column gradients back to (B, H, W, C)."""
    gc = gcols.reshape(b, h, w, 9, c)
    gxp = np.zeros((b, h + 2, w + 2, c))
    k = 0
    for i in range(3):
        for j in range(3):
            gxp[:, i : i + h, j : j + w, :] += gc[:, :, :, k, :]
            k += 1
    return gxp[:, 1 : 1 + h, 1 : 1 + w, :]


def _kernel_matrix(kernels: np.ndarray) -> np.ndarray:
    """(K, C, 3, 3) kernels -> (9*C, K) matmul layout matching _im2col."""
    k, c, kh, kw = kernels.shape
    return kernels.transpose(2, 3, 1, 0).reshape(9 * c, k)


def conv2d_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray,
                   stride: int = 1, padding: int = 1):
    if stride != 1 or padding != 1:
        raise GraphError("conv2d supports stride 1 / padding 1 only")
    if kernels.ndim != 4 or kernels.shape[2:] != (3, 3):
        raise GraphError(f"conv2d kernels must be (K, C, 3, 3), got {kernels.shape}")
    if x.ndim != 4:
        raise GraphError(f"conv2d input must be (B, C, H, W), got {x.shape}")
    b, c, h, w = x.shape
    kout, kin = kernels.shape[:2]
    if kin != c:
        raise GraphError(f"conv2d channel mismatch: input {c}, kernel depth {kin}")
    if bias.shape != (kout,):
        raise GraphError(f"conv2d bias must be ({kout},), got {bias.shape}")
    x_hwc = np.ascontiguousarray(x.transpose(0, 2, 3, 1))
    cols = _im2col(x_hwc)
    out = cols @ _kernel_matrix(kernels) + bias
    out = np.ascontiguousarray(out.reshape(b, h, w, kout).transpose(0, 3, 1, 2))
    return out, (cols, x.shape, kernels.shape)


def conv2d_backward(gout: np.ndarray, kernels: np.ndarray, cache):
    cols, xshape, kshape = cache
    b, c, h, w = xshape
    kout = kshape[0]
    gmat = np.ascontiguousarray(gout.transpose(0, 2, 3, 1)).reshape(b * h * w, kout)
    gw_mat = cols.T @ gmat
    gkernels = gw_mat.reshape(3, 3, c, kout).transpose(3, 2, 0, 1)
    gbias = gmat.sum(axis=0)
    gcols = gmat @ _kernel_matrix(kernels).T
    gx = _col2im(gcols, b, h, w, c).transpose(0, 3, 1, 2)
    return np.ascontiguousarray(gx), gkernels, gbias


def conv2d(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray,
           padding: int = 1, stride: int = 1) -> np.ndarray:
    """Convolution contract entry point; accepts CHW or BCHW input."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 3
    if squeeze:
        x = x[None]
    out, _ = conv2d_forward(x, np.asarray(kernels, dtype=np.float64),
                            np.asarray(bias, dtype=np.float64), stride, padding)
    return out[0] if squeeze else out


# ---------------------------------------------------------------------------
# 2x2 max pooling
# ---------------------------------------------------------------------------

def maxpool2_forward(x: np.ndarray):
    if x.ndim != 4:
        raise GraphError(f"maxpool2 input must be (B, C, H, W), got {x.shape}")
    b, c, h, w = x.shape
    if h % 2 or w % 2:
        raise GraphError(f"maxpool2 requires even spatial extents, got {h}x{w}")
    r = x.reshape(b, c, h // 2, 2, w // 2, 2)
    out = r.max(axis=(3, 5))
    # Equal maxima share the gradient; this matches central differences at ties.
    mask = r == out[:, :, :, None, :, None]
    cnt = mask.sum(axis=(3, 5))
    return out, (mask, cnt, x.shape)


def maxpool2_backward(gout: np.ndarray, cache):
    mask, cnt, xshape = cache
    b, c, h, w = xshape
    gr = mask * (gout / cnt)[:, :, :, None, :, None]
    return gr.reshape(b, c, h, w)


def maxpool2(x: np.ndarray) -> np.ndarray:
    """Max-pool contract entry point; accepts CHW or BCHW input."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 3
    if squeeze:
        x = x[None]
    out, _ = maxpool2_forward(x)
    return out[0] if squeeze else out


# ---------------------------------------------------------------------------
# dense / pointwise layers
# ---------------------------------------------------------------------------

def affine_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray):
    if x.ndim != 2:
        raise GraphError(f"affine input must be (B, D), got {x.shape}")
    if weight.ndim != 2 or weight.shape[0] != x.shape[1]:
        raise GraphError(
            f"affine weight {weight.shape} incompatible with input {x.shape}"
        )
    if bias.shape != (weight.shape[1],):
        raise GraphError(f"affine bias must be ({weight.shape[1]},), got {bias.shape}")
    return x @ weight + bias, x


def affine_backward(gout: np.ndarray, weight: np.ndarray, x: np.ndarray):
    return gout @ weight.T, x.T @ gout, gout.sum(axis=0)


def relu_forward(x: np.ndarray):
    return np.maximum(x, 0.0), x


def relu_backward(gout: np.ndarray, x: np.ndarray):
    return gout * (x > 0)


def flatten_forward(x: np.ndarray):
    return x.reshape(x.shape[0], -1), x.shape


def flatten_backward(gout: np.ndarray, xshape):
    return gout.reshape(xshape)


def concat_forward(xs: list[np.ndarray]):
    if any(x.ndim != 2 for x in xs):
        raise GraphError("concat expects (B, D) inputs")
    if len({x.shape[0] for x in xs}) != 1:
        raise GraphError(f"concat batch sizes differ: {[x.shape for x in xs]}")
    widths = [x.shape[1] for x in xs]
    return np.concatenate(xs, axis=1), widths


def concat_backward(gout: np.ndarray, widths: list[int]):
    splits = np.cumsum(widths)[:-1]
    return np.split(gout, splits, axis=1)


def dropout_forward(x: np.ndarray, rate: float, mode: str, rng: np.random.Generator):
    if not 0.0 <= rate < 1.0:
        raise GraphError(f"dropout rate must be in [0, 1), got {rate}")
    if mode == "eval" or rate == 0.0:
        return x, None
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(gout: np.ndarray, mask):
    return gout if mask is None else gout * mask


def batchnorm_forward(x: np.ndarray, scale: np.ndarray, shift: np.ndarray,
                      running_mean: np.ndarray, running_var: np.ndarray,
                      mode: str, eps: float, momentum: float):
    """Feature-wise batch normalization over (B, D) activations.

    Train mode normalizes with biased batch statistics and updates the running
    buffers in place; eval mode reads the running buffers.
    """
    if x.ndim != 2:
        raise GraphError(f"batchnorm input must be (B, D), got {x.shape}")
    if mode == "train":
        mean = x.mean(axis=0)
        var = x.var(axis=0)
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean
        running_var *= 1.0 - momentum
        running_var += momentum * var
    else:
        mean, var = running_mean, running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean) * inv_std
    return scale * xhat + shift, (x, xhat, mean, inv_std, mode)


def batchnorm_backward(gout: np.ndarray, scale: np.ndarray, cache):
    x, xhat, mean, inv_std, mode = cache
    gshift = gout.sum(axis=0)
    gscale = (gout * xhat).sum(axis=0)
    gxhat = gout * scale
    if mode == "eval":
        return gxhat * inv_std, gscale, gshift
    n = x.shape[0]
    gvar = (gxhat * (x - mean)).sum(axis=0) * (-0.5) * inv_std**3
    gmean = -(gxhat.sum(axis=0)) * inv_std + gvar * (-2.0 / n) * (x - mean).sum(axis=0)
    gx = gxhat * inv_std + gvar * 2.0 * (x - mean) / n + gmean / n
    return gx, gscale, gshift


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by max shift."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_ce_forward(logits: np.ndarray, targets: np.ndarray,
                       class_weights: np.ndarray | None = None):
    if logits.ndim != 2:
        raise GraphError(f"softmax-ce logits must be (B, K), got {logits.shape}")
    targets = np.asarray(targets)
    if targets.shape != (logits.shape[0],):
        raise GraphError(
            f"targets shape {targets.shape} does not match batch {logits.shape[0]}"
        )
    k = logits.shape[1]
    if targets.min(initial=0) < 0 or targets.max(initial=0) >= k:
        raise GraphError(f"target class out of range [0, {k})")
    if class_weights is not None:
        class_weights = np.asarray(class_weights, dtype=np.float64)
        if class_weights.shape != (k,) or np.any(class_weights <= 0):
            raise GraphError("class weights must be K positive reals")
    shifted = logits - logits.max(axis=1, keepdims=True)
    logprobs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    b = logits.shape[0]
    w = np.ones(b) if class_weights is None else class_weights[targets]
    loss = float(np.mean(-w * logprobs[np.arange(b), targets]))
    return loss, (np.exp(logprobs), targets, w)


def softmax_ce_backward(gout: float, cache):
    probs, targets, w = cache
    b = probs.shape[0]
    g = probs.copy()
    g[np.arange(b), targets] -= 1.0
    return g * (gout * w / b)[:, None]


def softmax_cross_entropy(logits: np.ndarray, targets, class_weights=None) -> float:
    """Mean weighted negative log softmax probability of the target class."""
    loss, _ = softmax_ce_forward(np.asarray(logits, dtype=np.float64),
                                 np.asarray(targets, dtype=np.int64),
                                 class_weights)
    return loss


def bce_logit_forward(logits: np.ndarray, targets: np.ndarray,
                      pos_weight: float | None = None):
    z = logits.reshape(-1)
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    if z.shape != y.shape:
        raise GraphError(f"bce-logit shapes differ: {z.shape} vs {y.shape}")
    if np.any((y != 0) & (y != 1)):
        raise GraphError("bce-logit targets must be 0/1")
    w = np.ones_like(y) if pos_weight is None else np.where(y == 1, pos_weight, 1.0)
    # stable: max(z,0) - z*y + log(1 + exp(-|z|))
    per = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    loss = float(np.mean(w * per))
    sig = 1.0 / (1.0 + np.exp(-z))
    return loss, (sig, y, w, logits.shape)


def bce_logit_backward(gout: float, cache):
    sig, y, w, shape = cache
    b = y.size
    return ((sig - y) * w * (gout / b)).reshape(shape)


def check_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite values in '{name}'")
