import numpy as np
import pytest

from irlsim.errors import TapeError
from irlsim.numerics import Tape, Var
from irlsim.numerics import tape as tp


def numeric_grad(fn, x, eps=1e-6):
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = fn(x)
        flat[i] = orig - eps
        lo = fn(x)
        flat[i] = orig
        gf[i] = (hi - lo) / (2 * eps)
    return g


@pytest.mark.parametrize("op,ref", [
    (tp.tanh, np.tanh),
    (tp.exp, np.exp),
    (tp.square, lambda v: v * v),
    (tp.relu, lambda v: np.maximum(v, 0.0)),
])
def test_elementwise_values_and_grads(op, ref, rng):
    x = rng.standard_normal((4, 3)) + 0.1
    tape = Tape()
    xv = tape.watch(x)
    out = tp.reduce_sum(op(xv))
    assert np.allclose(out.value, ref(x).sum())
    tape.backward(out)
    num = numeric_grad(lambda v: ref(v).sum(), x)
    assert np.allclose(tape.grad_for(x), num, atol=1e-8)


def test_log_grad(rng):
    x = rng.uniform(0.5, 2.0, (3, 2))
    tape = Tape()
    out = tp.reduce_sum(tp.log(tape.watch(x)))
    tape.backward(out)
    assert np.allclose(tape.grad_for(x), 1.0 / x)


def test_mul_broadcast_gradients(rng):
    a = rng.standard_normal((4, 3))
    b = rng.standard_normal(3)
    tape = Tape()
    out = tp.reduce_sum(tp.mul(tape.watch(a), tape.watch(b)))
    tape.backward(out)
    assert np.allclose(tape.grad_for(a), np.broadcast_to(b, a.shape))
    assert np.allclose(tape.grad_for(b), a.sum(axis=0))


def test_affine_grads(rng):
    x = rng.standard_normal((5, 3))
    w = rng.standard_normal((2, 3))
    b = rng.standard_normal(2)
    up = rng.standard_normal((5, 2))
    tape = Tape()
    out = tp.affine(tape.watch(x), tape.watch(w), tape.watch(b))
    loss = tp.reduce_sum(tp.mul(out, tp.constant(up)))
    tape.backward(loss)
    assert np.allclose(tape.grad_for(w), up.T @ x)
    assert np.allclose(tape.grad_for(b), up.sum(axis=0))
    assert np.allclose(tape.grad_for(x), up @ w)


def test_ens_affine_matches_per_member(rng):
    k, batch, din, dout = 3, 4, 2, 5
    x = rng.standard_normal((k, batch, din))
    w = rng.standard_normal((k, dout, din))
    b = rng.standard_normal((k, dout))
    tape = Tape()
    out = tp.ens_affine(tp.constant(x), tape.watch(w), tape.watch(b))
    for i in range(k):
        assert np.allclose(out.value[i], x[i] @ w[i].T + b[i])
    tape.backward(tp.reduce_sum(tp.square(out)))
    num = numeric_grad(lambda wv: ((x @ wv.transpose(0, 2, 1)
                                    + b[:, None, :]) ** 2).sum(), w)
    assert np.allclose(tape.grad_for(w), num, atol=1e-6)


def test_select_member_gather_and_scatter(rng):
    x = rng.standard_normal((3, 4, 2))
    idx = np.array([0, 2, 1, 0])
    tape = Tape()
    out = tp.select_member(tape.watch(x), idx)
    for i, k in enumerate(idx):
        assert np.array_equal(out.value[i], x[k, i])
    tape.backward(tp.reduce_sum(out))
    g = tape.grad_for(x)
    assert g.sum() == pytest.approx(8.0)
    assert g[0, 0].sum() == pytest.approx(2.0)
    assert g[1, 0].sum() == pytest.approx(0.0)


def test_concat_take_rows_slice(rng):
    a = rng.standard_normal((3, 2))
    b = rng.standard_normal((3, 4))
    tape = Tape()
    joint = tp.concat([tape.watch(a), tape.watch(b)], axis=-1)
    assert joint.value.shape == (3, 6)
    part = tp.slice_last(joint, 2, 5)
    rows = tp.take_rows(part, np.array([0, 0, 2]))
    tape.backward(tp.reduce_sum(rows))
    ga, gb = tape.grad_for(a), tape.grad_for(b)
    assert np.allclose(ga, 0.0)           # slice starts at column 2
    assert gb[0, 0] == pytest.approx(2.0)  # row 0 picked twice
    assert gb[1, 0] == pytest.approx(0.0)
    assert gb[2, 2] == pytest.approx(1.0)
    assert np.allclose(gb[:, 3], 0.0)      # column 5 not in the slice


def test_minimum_routes_gradient(rng):
    a = np.array([1.0, 5.0, 2.0])
    b = np.array([2.0, 3.0, 2.0])
    tape = Tape()
    out = tp.minimum(tape.watch(a), tape.watch(b))
    tape.backward(tp.reduce_sum(out))
    assert np.array_equal(tape.grad_for(a), [1.0, 0.0, 1.0])  # ties go to a
    assert np.array_equal(tape.grad_for(b), [0.0, 1.0, 0.0])


def test_clip_masks_gradient():
    x = np.array([-2.0, 0.5, 3.0])
    tape = Tape()
    out = tp.clip(tape.watch(x), -1.0, 1.0)
    assert np.array_equal(out.value, [-1.0, 0.5, 1.0])
    tape.backward(tp.reduce_sum(out))
    assert np.array_equal(tape.grad_for(x), [0.0, 1.0, 0.0])


def test_watch_caches_leaves_and_accumulates(rng):
    x = rng.standard_normal(3)
    tape = Tape()
    v1, v2 = tape.watch(x), tape.watch(x)
    assert v1 is v2
    out = tp.add(tp.reduce_sum(tp.square(v1)), tp.reduce_sum(v2))
    tape.backward(out)
    assert np.allclose(tape.grad_for(x), 2 * x + 1.0)


def test_constants_receive_no_gradient(rng):
    x = rng.standard_normal(3)
    tape = Tape()
    out = tp.reduce_sum(tp.mul(tp.constant(x), tape.watch(x)))
    tape.backward(out)
    assert np.allclose(tape.grad_for(x), x)  # only the watched side


def test_stop_gradient_blocks_flow(rng):
    x = rng.standard_normal(3)
    tape = Tape()
    xv = tape.watch(x)
    out = tp.reduce_sum(tp.mul(tp.stop_gradient(xv), xv))
    tape.backward(out)
    assert np.allclose(tape.grad_for(x), x)


def test_double_backward_rejected(rng):
    tape = Tape()
    out = tp.reduce_sum(tape.watch(rng.standard_normal(2)))
    tape.backward(out)
    with pytest.raises(TapeError):
        tape.backward(out)


def test_backward_foreign_root_rejected(rng):
    tape = Tape()
    other = Tape()
    out = tp.reduce_sum(other.watch(rng.standard_normal(2)))
    with pytest.raises(TapeError):
        tape.backward(out)


def test_operator_sugar(rng):
    x = rng.standard_normal(4)
    tape = Tape()
    xv = tape.watch(x)
    out = tp.reduce_sum((xv + 1.0) * xv - 0.5 * xv)
    tape.backward(out)
    assert np.allclose(tape.grad_for(x), 2 * x + 0.5)
