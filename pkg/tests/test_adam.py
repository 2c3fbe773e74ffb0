import numpy as np
import pytest

from fairembed.errors import ShapeError
from fairembed.nn import AdamState, adam_step


def test_zero_gradient_is_identity_from_fresh_state():
    p = np.array([1.5, -2.0, 0.25])
    state = AdamState.for_params([p])
    before = p.copy()
    adam_step(state, [p], [np.zeros(3)])
    assert np.array_equal(p, before)
    assert state.step_count == 1


def test_first_step_moves_by_lr_times_sign():
    # hand-evaluated recurrence at t=1: mhat = g, vhat = g^2, so the update
    # is lr * g/(|g| + eps) ~= lr * sign(g)
    p = np.array([0.0])
    state = AdamState.for_params([p], learning_rate=1e-3)
    adam_step(state, [p], [np.array([1.0])])
    assert abs(p[0] + 1e-3) < 1e-8


def test_identical_tensors_get_identical_updates():
    a = np.random.default_rng(0).normal(size=(4, 3))
    b = a.copy()
    g = np.random.default_rng(1).normal(size=(4, 3))
    state = AdamState.for_params([a, b])
    for _ in range(5):
        adam_step(state, [a, b], [g, g])
    assert np.array_equal(a, b)


def test_shape_mismatch_raises():
    p = np.zeros(3)
    state = AdamState.for_params([p])
    with pytest.raises(ShapeError):
        adam_step(state, [p], [np.zeros(4)])


def test_moments_track_parameter_shapes():
    p = [np.zeros((2, 3)), np.zeros(5)]
    state = AdamState.for_params(p)
    assert state.first_moment[0].shape == (2, 3)
    assert state.second_moment[1].shape == (5,)
