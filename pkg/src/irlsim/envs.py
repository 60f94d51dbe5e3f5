"""Analytic continuous-control environments with evaluation-only rewards.

Two systems at desk scale:

  * ``pointmass`` — double integrator on the plane steering toward (1, 1).
    Observation (x, y, vx, vy), acceleration action in [-1, 1]^2.
  * ``pendulum``  — torque-limited swing-up. Internal state (theta, theta_dot),
    observation (cos theta, sin theta, theta_dot), torque in [-2, 2].

The true reward only ever feeds evaluation and the behavior policies that
generate datasets; learned-model training sees (s, a, s') tuples exclusively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError

ENV_IDS = ("pointmass", "pendulum")

POINTMASS_GOAL = np.array([1.0, 1.0])
POINTMASS_MAX_SPEED = 1.0
PENDULUM_G = 10.0
PENDULUM_M = 1.0
PENDULUM_L = 1.0
PENDULUM_MAX_SPEED = 8.0


@dataclass(frozen=True, eq=False)
class EnvSpec:
    env_id: str
    state_dim: int          # observation width
    action_dim: int
    action_low: np.ndarray
    action_high: np.ndarray
    dt: float
    horizon: int


def make_spec(env_id: str) -> EnvSpec:
    if env_id == "pointmass":
        return EnvSpec("pointmass", 4, 2, np.array([-1.0, -1.0]),
                       np.array([1.0, 1.0]), 0.05, 200)
    if env_id == "pendulum":
        return EnvSpec("pendulum", 3, 1, np.array([-2.0]), np.array([2.0]),
                       0.05, 200)
    raise ConfigurationError(f"unknown environment id {env_id!r}")


@dataclass
class EnvState:
    vec: np.ndarray          # internal state (pendulum: (theta, theta_dot))
    t: int = 0


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def wrap_angle(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    w = (x + np.pi) % (2.0 * np.pi) - np.pi
    if w == -np.pi:
        w = np.pi
    return w


def reset(spec: EnvSpec, seed_or_rng) -> EnvState:
    rng = _as_rng(seed_or_rng)
    if spec.env_id == "pointmass":
        pos = rng.uniform(-0.5, 0.5, size=2)
        return EnvState(np.concatenate([pos, np.zeros(2)]), 0)
    if spec.env_id == "pendulum":
        theta = rng.uniform(-np.pi, np.pi)
        theta_dot = rng.uniform(-1.0, 1.0)
        return EnvState(np.array([theta, theta_dot]), 0)
    raise ConfigurationError(f"unknown environment id {spec.env_id!r}")


def observe(spec: EnvSpec, state: EnvState) -> np.ndarray:
    if spec.env_id == "pointmass":
        return state.vec.copy()
    theta, theta_dot = state.vec
    return np.array([np.cos(theta), np.sin(theta), theta_dot])


def step(spec: EnvSpec, state: EnvState, action) -> tuple:
    """Advance one step; returns (next_state, true_reward, done)."""
    action = np.asarray(action, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(state.vec)) or not np.all(np.isfinite(action)):
        raise NumericalError("non-finite state or action")
    if action.shape != (spec.action_dim,):
        raise ConfigurationError(
            f"action shape {action.shape} != ({spec.action_dim},)")
    a = np.clip(action, spec.action_low, spec.action_high)
    if spec.env_id == "pointmass":
        pos, vel = state.vec[:2], state.vec[2:]
        new_vel = np.clip(vel + spec.dt * a, -POINTMASS_MAX_SPEED,
                          POINTMASS_MAX_SPEED)
        new_pos = pos + spec.dt * new_vel
        reward = -float(np.linalg.norm(new_pos - POINTMASS_GOAL)) \
            - 0.01 * float(a @ a)
        nxt = EnvState(np.concatenate([new_pos, new_vel]), state.t + 1)
    elif spec.env_id == "pendulum":
        theta, theta_dot = state.vec
        u = a[0]
        accel = 3.0 * PENDULUM_G / (2.0 * PENDULUM_L) * np.sin(theta) \
            + 3.0 * u / (PENDULUM_M * PENDULUM_L ** 2)
        new_theta_dot = float(np.clip(theta_dot + spec.dt * accel,
                                      -PENDULUM_MAX_SPEED, PENDULUM_MAX_SPEED))
        new_theta = wrap_angle(theta + spec.dt * new_theta_dot)
        reward = -(new_theta ** 2 + 0.1 * new_theta_dot ** 2 + 0.001 * u ** 2)
        nxt = EnvState(np.array([new_theta, new_theta_dot]), state.t + 1)
    else:
        raise ConfigurationError(f"unknown environment id {spec.env_id!r}")
    return nxt, float(reward), nxt.t >= spec.horizon


def state_from_observation(spec: EnvSpec, obs: np.ndarray, t: int = 0) -> EnvState:
    """Rebuild an internal state from an observation (for replay checks)."""
    obs = np.asarray(obs, dtype=np.float64)
    if spec.env_id == "pointmass":
        return EnvState(obs.copy(), t)
    theta = float(np.arctan2(obs[1], obs[0]))
    return EnvState(np.array([theta, obs[2]]), t)


def random_actor(spec: EnvSpec):
    """Uniform-action actor over the declared bounds."""
    def act(obs, rng):
        return rng.uniform(spec.action_low, spec.action_high)
    return act


def episode_return(spec: EnvSpec, actor, rng, horizon: int | None = None) -> float:
    """Undiscounted true return of one episode; actor(obs, rng) -> action."""
    state = reset(spec, rng)
    total = 0.0
    steps = spec.horizon if horizon is None else horizon
    for _ in range(steps):
        action = actor(observe(spec, state), rng)
        state, reward, done = step(spec, state, action)
        total += reward
        if done:
            break
    return total
