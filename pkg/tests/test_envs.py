import numpy as np
import pytest

from irlsim import envs
from irlsim.errors import ConfigurationError, NumericalError


def test_unknown_env_rejected():
    with pytest.raises(ConfigurationError):
        envs.make_spec("cartpole")


def test_reset_deterministic_per_seed():
    spec = envs.make_spec("pendulum")
    s1 = envs.reset(spec, 7)
    s2 = envs.reset(spec, 7)
    assert np.array_equal(s1.vec, s2.vec)


def test_pointmass_reset_zero_velocity():
    spec = envs.make_spec("pointmass")
    state = envs.reset(spec, 3)
    assert np.array_equal(state.vec[2:], np.zeros(2))
    assert np.all(np.abs(state.vec[:2]) <= 0.5)


def test_pointmass_reset_mean_near_origin():
    spec = envs.make_spec("pointmass")
    rng = np.random.default_rng(11)
    positions = np.array([envs.reset(spec, rng).vec[:2] for _ in range(10_000)])
    assert np.all(np.abs(positions.mean(axis=0)) < 0.02)


def test_pendulum_fixed_point():
    spec = envs.make_spec("pendulum")
    state = envs.EnvState(np.zeros(2))
    nxt, reward, done = envs.step(spec, state, np.zeros(1))
    assert np.array_equal(nxt.vec, np.zeros(2))
    assert reward == 0.0
    assert not done


def test_pointmass_euler_step():
    spec = envs.make_spec("pointmass")
    state = envs.EnvState(np.array([0.0, 0.0, 1.0, 0.0]))
    nxt, _, _ = envs.step(spec, state, np.zeros(2))
    assert np.allclose(nxt.vec[:2], [0.05, 0.0])


def test_pendulum_direct_update_evaluation():
    spec = envs.make_spec("pendulum")
    state = envs.EnvState(np.array([np.pi / 2, 0.0]))
    nxt, reward, _ = envs.step(spec, state, np.zeros(1))
    assert nxt.vec[1] == pytest.approx(0.75)                # 0.05 * 15 * sin(pi/2)
    assert nxt.vec[0] == pytest.approx(np.pi / 2 + 0.0375)
    expected_reward = -((np.pi / 2 + 0.0375) ** 2 + 0.1 * 0.75 ** 2)
    assert reward == pytest.approx(expected_reward)


def test_step_deterministic():
    spec = envs.make_spec("pendulum")
    state = envs.EnvState(np.array([1.0, -0.5]))
    a = np.array([0.3])
    n1, r1, _ = envs.step(spec, state, a)
    n2, r2, _ = envs.step(spec, state, a)
    assert np.array_equal(n1.vec, n2.vec)
    assert r1 == r2


def test_rewards_nonpositive_and_clamps_hold(rng):
    for env_id in envs.ENV_IDS:
        spec = envs.make_spec(env_id)
        state = envs.reset(spec, rng)
        for _ in range(300):
            action = rng.uniform(2 * spec.action_low, 2 * spec.action_high)
            state, reward, done = envs.step(spec, state, action)
            assert reward <= 0.0
            if env_id == "pointmass":
                assert np.all(np.abs(state.vec[2:]) <= envs.POINTMASS_MAX_SPEED)
            else:
                assert abs(state.vec[1]) <= envs.PENDULUM_MAX_SPEED
            if done:
                state = envs.reset(spec, rng)


def test_time_limit_termination():
    spec = envs.make_spec("pointmass")
    state = envs.reset(spec, 0)
    done = False
    steps = 0
    while not done:
        state, _, done = envs.step(spec, state, np.zeros(2))
        steps += 1
    assert steps == spec.horizon


def test_non_finite_action_rejected():
    spec = envs.make_spec("pointmass")
    state = envs.reset(spec, 0)
    with pytest.raises(NumericalError):
        envs.step(spec, state, np.array([np.nan, 0.0]))


def test_wrap_angle_interval():
    assert envs.wrap_angle(np.pi) == pytest.approx(np.pi)
    assert envs.wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert envs.wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)
    assert envs.wrap_angle(0.3) == pytest.approx(0.3)


def test_observation_roundtrip():
    spec = envs.make_spec("pendulum")
    state = envs.EnvState(np.array([2.1, -0.7]))
    obs = envs.observe(spec, state)
    back = envs.state_from_observation(spec, obs)
    assert np.allclose(back.vec, state.vec)
