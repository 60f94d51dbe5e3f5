import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irlsim.errors import ConfigurationError, NumericalError
from irlsim.numerics import AdamState, adam_step


def test_zero_gradient_is_identity_on_params():
    params = [np.array([1.0, -2.0]), np.array([[3.0]])]
    state = AdamState.for_params(params)
    before = [p.copy() for p in params]
    adam_step(state, params, [np.zeros(2), np.zeros((1, 1))], 1e-3)
    assert state.t == 1
    for p, b in zip(params, before):
        assert np.array_equal(p, b)


def test_first_step_magnitude_is_lr_times_sign():
    # bias correction makes the very first update lr * g / (|g| + eps)
    params = [np.array([1.0])]
    state = AdamState.for_params(params)
    adam_step(state, params, [np.array([0.5])], 1e-3)
    assert params[0][0] == pytest.approx(0.999, abs=1e-6)


def test_two_scripted_steps_match_hand_recurrence():
    # quadratic 0.5 * p^2, gradient p; replay the textbook recurrence
    p = 1.0
    params = [np.array([p])]
    state = AdamState.for_params(params)
    m = v = 0.0
    lr, b1, b2, eps = 1e-3, 0.9, 0.999, 1e-8
    for t in (1, 2):
        g = params[0][0]  # current gradient of the quadratic
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1 ** t)
        v_hat = v / (1 - b2 ** t)
        p = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        adam_step(state, params, [np.array([g])], lr)
        assert abs(params[0][0] - p) < 1e-12
    assert state.t == 2


def test_non_finite_gradients_rejected_without_mutation():
    params = [np.array([1.0])]
    state = AdamState.for_params(params)
    with pytest.raises(NumericalError):
        adam_step(state, params, [np.array([np.nan])], 1e-3)
    assert params[0][0] == 1.0
    assert state.t == 0


def test_shape_mismatch_rejected():
    params = [np.zeros(2)]
    state = AdamState.for_params(params)
    with pytest.raises(ConfigurationError):
        adam_step(state, params, [np.zeros(3)], 1e-3)


def test_negative_lr_rejected():
    params = [np.zeros(1)]
    state = AdamState.for_params(params)
    with pytest.raises(ConfigurationError):
        adam_step(state, params, [np.zeros(1)], -1.0)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6),
       st.integers(1, 5))
@settings(max_examples=30, deadline=None)
def test_second_moment_nonnegative_and_t_increments(grad_vals, steps):
    params = [np.zeros(len(grad_vals))]
    state = AdamState.for_params(params)
    g = np.array(grad_vals)
    for k in range(steps):
        adam_step(state, params, [g], 1e-3)
        assert state.t == k + 1
        assert np.all(state.v[0] >= 0.0)
        assert np.all(np.isfinite(params[0]))
