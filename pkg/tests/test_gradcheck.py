import numpy as np

from irlsim.numerics import finite_diff_check


def test_quadratic_loss_is_exact(rng):
    params = [rng.standard_normal(5), rng.standard_normal((2, 3))]

    def loss_and_grad(ps):
        value = 0.5 * sum(float((p * p).sum()) for p in ps)
        return value, [p.copy() for p in ps]

    assert finite_diff_check(loss_and_grad, params) < 1e-8


def test_detects_a_wrong_gradient(rng):
    params = [rng.standard_normal(4)]

    def bad(ps):
        value = 0.5 * float((ps[0] ** 2).sum())
        return value, [2.0 * ps[0]]  # off by a factor of two

    assert finite_diff_check(bad, params) > 0.3


def test_coordinate_subsampling(rng):
    params = [rng.standard_normal(200)]

    def loss_and_grad(ps):
        return 0.5 * float((ps[0] ** 2).sum()), [ps[0].copy()]

    err = finite_diff_check(loss_and_grad, params, max_coords=20,
                            rng=np.random.default_rng(0))
    assert err < 1e-7
