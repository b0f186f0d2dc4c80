"""Op-level forward/backward contracts against hand-computed oracles."""

import numpy as np
import pytest

from fusiondx.autodiff import conv2d, maxpool2, softmax, softmax_cross_entropy
from fusiondx.autodiff import ops
from fusiondx.errors import GraphError


class TestConv2d:
    def test_identity_kernel_reproduces_input(self):
        rng = np.random.default_rng(0)
        x = rng.random((1, 5, 6))
        kern = np.zeros((1, 1, 3, 3))
        kern[0, 0, 1, 1] = 1.0
        out = conv2d(x, kern, np.zeros(1))
        np.testing.assert_allclose(out, x)

    def test_zero_kernels_give_constant_bias(self):
        x = np.random.default_rng(1).random((2, 3, 4, 4))
        kern = np.zeros((5, 3, 3, 3))
        bias = np.array([0.5, -1.0, 2.0, 0.0, 3.25])
        out = conv2d(x, kern, bias)
        for k, b in enumerate(bias):
            np.testing.assert_allclose(out[:, k], b)

    def test_hand_computed_3x3(self):
        x = np.arange(9, dtype=float).reshape(1, 3, 3)
        kern = np.zeros((1, 1, 3, 3))
        kern[0, 0] = [[0, 1, 0], [1, 0, -1], [0, -1, 0]]
        # out[h, w] = x[h-1, w] + x[h, w-1] - x[h, w+1] - x[h+1, w], zero padded
        expected = np.array([
            [0 + 0 - 1 - 3, 0 + 0 - 2 - 4, 0 + 1 - 0 - 5],
            [0 + 0 - 4 - 6, 1 + 3 - 5 - 7, 2 + 4 - 0 - 8],
            [3 + 0 - 7 - 0, 4 + 6 - 8 - 0, 5 + 7 - 0 - 0],
        ], dtype=float)
        out = conv2d(x, kern, np.zeros(1))
        np.testing.assert_allclose(out[0], expected)

    def test_channel_mismatch_rejected(self):
        with pytest.raises(GraphError, match="channel mismatch"):
            conv2d(np.zeros((2, 4, 4)), np.zeros((1, 3, 3, 3)), np.zeros(1))

    def test_spatial_size_preserved(self):
        out = conv2d(np.zeros((1, 3, 8, 10)), np.zeros((7, 3, 3, 3)), np.zeros(7))
        assert out.shape == (1, 7, 8, 10)

    def test_backward_matches_brute_force(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((2, 3, 4, 4))
        kern = rng.standard_normal((5, 3, 3, 3))
        bias = rng.standard_normal(5)
        out, cache = ops.conv2d_forward(x, kern, bias)
        gout = rng.standard_normal(out.shape)
        gx, gk, gb = ops.conv2d_backward(gout, kern, cache)

        eps = 1e-6
        def loss(xv, kv, bv):
            o, _ = ops.conv2d_forward(xv, kv, bv)
            return float((o * gout).sum())

        for arr, grad in ((x, gx), (kern, gk), (bias, gb)):
            flat = arr.reshape(-1)
            picks = rng.choice(flat.size, size=min(8, flat.size), replace=False)
            for idx in picks:
                keep = flat[idx]
                flat[idx] = keep + eps
                up = loss(x, kern, bias)
                flat[idx] = keep - eps
                down = loss(x, kern, bias)
                flat[idx] = keep
                np.testing.assert_allclose(
                    grad.reshape(-1)[idx], (up - down) / (2 * eps), atol=1e-6
                )


class TestMaxpool2:
    def test_constant_input(self):
        out = maxpool2(np.full((2, 4, 6), 3.5))
        np.testing.assert_allclose(out, 3.5)
        assert out.shape == (2, 2, 3)

    def test_single_window(self):
        out = maxpool2(np.array([[[1.0, 2.0], [3.0, 4.0]]]))
        np.testing.assert_allclose(out, [[[4.0]]])

    def test_matches_window_scan(self):
        rng = np.random.default_rng(3)
        x = rng.random((2, 4, 4))
        out = maxpool2(x)
        for c in range(2):
            for i in range(2):
                for j in range(2):
                    window = x[c, 2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
                    assert out[c, i, j] == window.max()

    def test_odd_extent_rejected(self):
        with pytest.raises(GraphError, match="even"):
            maxpool2(np.zeros((1, 3, 4)))

    def test_tied_maxima_share_gradient(self):
        x = np.zeros((1, 1, 2, 2))
        out, cache = ops.maxpool2_forward(x)
        gx = ops.maxpool2_backward(np.ones_like(out), cache)
        np.testing.assert_allclose(gx, 0.25)


class TestSoftmaxCrossEntropy:
    def test_uniform_logits(self):
        loss = softmax_cross_entropy(np.zeros((1, 3)), [0])
        assert loss == pytest.approx(np.log(3.0), abs=1e-12)

    def test_saturated_target(self):
        logits = np.array([[30.0, 0.0, 0.0]])
        assert softmax_cross_entropy(logits, [0]) < 1e-9

    def test_weighted_matches_direct_formula(self):
        logits = np.array([[1.0, -0.5, 2.0], [0.2, 0.1, -1.0]])
        targets = np.array([2, 1])
        weights = np.array([1.0, 2.0, 1.0])
        probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
        expected = np.mean([
            -weights[2] * np.log(probs[0, 2]),
            -weights[1] * np.log(probs[1, 1]),
        ])
        loss = softmax_cross_entropy(logits, targets, weights)
        assert loss == pytest.approx(expected, rel=1e-12)

    def test_out_of_range_target_rejected(self):
        with pytest.raises(GraphError, match="out of range"):
            softmax_cross_entropy(np.zeros((1, 3)), [3])

    def test_rows_sum_to_one_and_loss_nonnegative(self):
        rng = np.random.default_rng(11)
        logits = rng.standard_normal((50, 4)) * 10
        rows = softmax(logits).sum(axis=1)
        np.testing.assert_allclose(rows, 1.0, atol=1e-12)
        targets = rng.integers(0, 4, size=50)
        assert softmax_cross_entropy(logits, targets) >= 0.0

    def test_all_ones_weights_equal_unweighted(self):
        rng = np.random.default_rng(5)
        logits = rng.standard_normal((8, 3))
        targets = rng.integers(0, 3, size=8)
        assert softmax_cross_entropy(logits, targets) == softmax_cross_entropy(
            logits, targets, np.ones(3)
        )


class TestBceLogit:
    def test_matches_direct_formula(self):
        z = np.array([0.3, -1.2, 2.0])
        y = np.array([1.0, 0.0, 1.0])
        loss, _ = ops.bce_logit_forward(z, y)
        p = 1 / (1 + np.exp(-z))
        expected = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))
        assert loss == pytest.approx(expected, rel=1e-12)

    def test_extreme_logits_stay_finite(self):
        loss, _ = ops.bce_logit_forward(np.array([500.0, -500.0]), np.array([0.0, 1.0]))
        assert np.isfinite(loss)


class TestAffineRelu:
    def test_relu_affine_hand_case(self):
        x = np.array([[1.0, -2.0]])
        w = np.array([[1.0, 3.0], [2.0, -1.0]])
        b = np.array([0.5, 0.0])
        pre, _ = ops.affine_forward(x, w, b)
        np.testing.assert_allclose(pre, [[1 - 4 + 0.5, 3 + 2]])
        out, _ = ops.relu_forward(pre)
        np.testing.assert_allclose(out, [[0.0, 5.0]])


class TestDropout:
    def test_eval_mode_identity(self):
        x = np.random.default_rng(0).random((4, 8))
        out, _ = ops.dropout_forward(x, 0.5, "eval", np.random.default_rng(1))
        assert out is x

    def test_train_mean_preserved_by_inverted_scaling(self):
        rng = np.random.default_rng(42)
        x = np.full(256, 2.0)
        total = np.zeros_like(x)
        reps = 10_000
        for _ in range(reps):
            out, _ = ops.dropout_forward(x, 0.4, "train", rng)
            total += out
        assert abs(total.mean() / reps - 2.0) / 2.0 < 0.02


class TestBatchnorm:
    def test_train_normalizes_per_feature(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((64, 5)) * 3 + 7
        out, _ = ops.batchnorm_forward(
            x, np.ones(5), np.zeros(5), np.zeros(5), np.ones(5),
            "train", 1e-5, 0.1,
        )
        assert np.all(np.abs(out.mean(axis=0)) < 1e-6)
        np.testing.assert_allclose(out.var(axis=0), 1.0, atol=1e-4)

    def test_eval_uses_running_stats(self):
        x = np.ones((4, 2))
        rm, rv = np.array([1.0, 1.0]), np.array([4.0, 1.0])
        out, _ = ops.batchnorm_forward(
            x, np.ones(2), np.zeros(2), rm, rv, "eval", 0.0, 0.1
        )
        np.testing.assert_allclose(out, 0.0, atol=1e-12)
