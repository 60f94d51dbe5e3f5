import numpy as np
import pytest

from irlsim.errors import ConfigurationError, TapeError
from irlsim.numerics import (LOG_STD_MAX, LOG_STD_MIN, MlpParams, Tape,
                             finite_diff_check, init_mlp, mlp_backward,
                             mlp_eval, mlp_forward, split_gaussian_head)
from irlsim.numerics import tape as tp


def test_zero_net_maps_everything_to_zero(rng):
    params = MlpParams([np.zeros((3, 2)), np.zeros((4, 3))],
                       [np.zeros(3), np.zeros(4)], "tanh", "linear")
    out = mlp_forward(params, rng.standard_normal(2))
    assert np.array_equal(out.value, np.zeros(4))


def test_identity_single_layer():
    params = MlpParams([np.array([[1.0]])], [np.array([0.0])], "tanh", "linear")
    out = mlp_forward(params, np.array([0.7]))
    assert out.value[0] == pytest.approx(0.7, abs=0)


def test_two_layer_hand_computation():
    # straight-line evaluation of the same affine+tanh composition
    w0 = np.array([[0.5, -0.25], [1.0, 0.75]])
    b0 = np.array([0.1, -0.2])
    w1 = np.array([[2.0, -1.0]])
    b1 = np.array([0.05])
    params = MlpParams([w0, w1], [b0, b1], "tanh", "linear")
    x = np.array([0.3, -0.6])
    hidden = np.tanh(w0 @ x + b0)
    expected = w1 @ hidden + b1
    out = mlp_forward(params, x)
    assert abs(out.value[0] - expected[0]) < 1e-12


def test_forward_matches_eval_all_heads(rng):
    for head in ("linear", "tanh", "gaussian"):
        out_dim = 6 if head == "gaussian" else 3
        params = init_mlp([4, 8, 8, out_dim], "tanh", head, rng)
        x = rng.standard_normal((5, 4))
        assert np.array_equal(mlp_forward(params, x).value, mlp_eval(params, x))


def test_relu_activation_forward(rng):
    params = init_mlp([2, 4, 1], "relu", "linear", rng)
    x = rng.standard_normal(2)
    h = np.maximum(params.weights[0] @ x + params.biases[0], 0.0)
    expected = params.weights[1] @ h + params.biases[1]
    assert np.allclose(mlp_forward(params, x).value, expected)


def test_gaussian_head_log_std_is_clamped(rng):
    params = init_mlp([3, 8, 4], "tanh", "gaussian", rng)
    params.weights[-1] += 100.0  # drive the raw head to saturation
    out = mlp_eval(params, rng.standard_normal((10, 3)))
    _, log_std = split_gaussian_head(out)
    assert np.all(log_std >= LOG_STD_MIN)
    assert np.all(log_std <= LOG_STD_MAX)


def test_tanh_head_strictly_inside_unit_interval(rng):
    params = init_mlp([2, 4, 1], "tanh", "tanh", rng)
    params.weights[-1] *= 1e6
    out = mlp_eval(params, 100.0 * rng.standard_normal((100, 2)))
    assert np.all(np.abs(out) < 1.0)


def test_dimension_mismatch_rejected(rng):
    params = init_mlp([3, 4, 2], rng=rng)
    with pytest.raises(ConfigurationError):
        mlp_forward(params, np.zeros(5))


def test_chained_dims_validated():
    bad = MlpParams([np.zeros((3, 2)), np.zeros((4, 5))],
                    [np.zeros(3), np.zeros(4)])
    with pytest.raises(ConfigurationError):
        bad.validate()


def test_backward_zero_weight_net_bias_gradient(rng):
    # constant net: early-layer weights see zero gradient, last bias sees
    # exactly the upstream
    params = MlpParams([np.zeros((3, 2)), np.zeros((2, 3))],
                       [np.zeros(3), np.zeros(2)], "tanh", "linear")
    tape = Tape()
    mlp_forward(params, rng.standard_normal(2), tape)
    upstream = np.array([0.3, -0.7])
    grads = mlp_backward(tape, upstream)
    g_w0, g_b0, g_w1, g_b1 = grads
    assert np.allclose(g_w0, 0.0)
    assert np.allclose(g_w1, 0.0)  # hidden activations are zero
    assert np.allclose(g_b1, upstream)


def test_backward_single_linear_layer(rng):
    w = rng.standard_normal((3, 4))
    params = MlpParams([w], [np.zeros(3)], "tanh", "linear")
    x = rng.standard_normal(4)
    upstream = rng.standard_normal(3)
    tape = Tape()
    mlp_forward(params, x, tape)
    g_w, g_b = mlp_backward(tape, upstream)
    assert np.allclose(g_w, np.outer(upstream, x))
    assert np.allclose(g_b, upstream)


def test_backward_matches_finite_differences(rng):
    params = init_mlp([3, 6, 5, 2], "tanh", "linear", rng)
    x = rng.standard_normal(3)
    upstream = rng.standard_normal(2)

    def loss_and_grad(arrs):
        tape = Tape()
        out = mlp_forward(params, x, tape)
        value = float(upstream @ out.value)
        return value, mlp_backward(tape, upstream)

    assert finite_diff_check(loss_and_grad, params.arrays()) < 1e-4


def test_backward_without_forward_rejected():
    with pytest.raises(TapeError):
        mlp_backward(Tape(), np.zeros(2))


def test_backward_shape_mismatch_rejected(rng):
    params = init_mlp([2, 3], rng=rng)
    tape = Tape()
    mlp_forward(params, np.zeros(2), tape)
    with pytest.raises(TapeError):
        mlp_backward(tape, np.zeros(5))
