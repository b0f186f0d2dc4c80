"""Adam update contracts."""

import numpy as np
import pytest

from fusiondx.autodiff import AdamState, Tensor, adam_step
from fusiondx.errors import GraphError, NumericalError


def test_zero_gradient_leaves_parameters_unchanged():
    params = {"w": Tensor(np.array([1.0, -2.0, 3.0]))}
    state = AdamState(lr=0.1)
    adam_step(params, {"w": np.zeros(3)}, state)
    np.testing.assert_array_equal(params["w"].values, [1.0, -2.0, 3.0])
    assert state.t == 1


def test_first_step_is_lr_times_sign():
    # bias-corrected m/v cancel on step one: update = g / (|g| + eps')
    for g in (0.37, -12.0, 1e-4):
        params = {"w": Tensor(np.array([5.0]))}
        state = AdamState(lr=1e-3)
        adam_step(params, {"w": np.array([g])}, state)
        expected = 5.0 - 1e-3 * np.sign(g)
        assert params["w"].values[0] == pytest.approx(expected, abs=1e-6)


def test_descent_on_quadratic_converges():
    params = {"x": Tensor(np.array([0.0]))}
    state = AdamState(lr=0.1)
    for _ in range(100):
        grad = 2.0 * (params["x"].values - 3.0)
        adam_step(params, {"x": grad}, state)
    assert abs(params["x"].values[0] - 3.0) < 0.1


def test_decoupled_weight_decay_applied_after_update():
    params = {"w": Tensor(np.array([2.0]))}
    state = AdamState(lr=0.5, weight_decay=0.1)
    adam_step(params, {"w": np.zeros(1)}, state)
    # zero gradient: only the decay term acts, w <- w - lr*wd*w
    assert params["w"].values[0] == pytest.approx(2.0 * (1 - 0.05))


def test_nan_gradient_rejected_with_name():
    params = {"bad_param": Tensor(np.ones(2))}
    with pytest.raises(NumericalError, match="bad_param"):
        adam_step(params, {"bad_param": np.array([1.0, np.nan])}, AdamState())


def test_nonpositive_lr_rejected():
    with pytest.raises(GraphError):
        AdamState(lr=0.0)


def test_step_counter_strictly_increases():
    params = {"w": Tensor(np.zeros(1))}
    state = AdamState()
    for expected in (1, 2, 3):
        adam_step(params, {"w": np.ones(1)}, state)
        assert state.t == expected
