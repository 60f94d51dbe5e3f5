"""Rolling policies in the true environment to build transition datasets."""

from __future__ import annotations

import numpy as np

from .. import envs
from ..errors import ConfigurationError
from .datasets import Dataset


def _as_actor(spec: envs.EnvSpec, policy_or_random):
    """Accept None (uniform random), a callable, or an object with .act()."""
    if policy_or_random is None:
        return envs.random_actor(spec)
    if callable(policy_or_random):
        return policy_or_random
    if hasattr(policy_or_random, "act"):
        return lambda obs, rng: policy_or_random.act(obs, rng)
    raise ConfigurationError("policy must be None, callable, or expose .act()")


def collect_dataset(spec: envs.EnvSpec, policy_or_random, n: int, seed: int,
                    quality: str, *, record_true_reward: bool = True) -> Dataset:
    """Roll episodes until exactly ``n`` transitions are recorded."""
    if n <= 0:
        raise ConfigurationError(f"dataset size must be positive, got {n}")
    actor = _as_actor(spec, policy_or_random)
    rng = np.random.default_rng(seed)
    states = np.empty((n, spec.state_dim))
    actions = np.empty((n, spec.action_dim))
    next_states = np.empty((n, spec.state_dim))
    rewards = np.empty(n) if record_true_reward else None

    episode_returns = []
    i = 0
    partial_return = 0.0
    while i < n:
        state = envs.reset(spec, rng)
        obs = envs.observe(spec, state)
        ep_ret = 0.0
        done = False
        while not done and i < n:
            action = np.clip(actor(obs, rng), spec.action_low, spec.action_high)
            state, reward, done = envs.step(spec, state, action)
            next_obs = envs.observe(spec, state)
            states[i] = obs
            actions[i] = action
            next_states[i] = next_obs
            if rewards is not None:
                rewards[i] = reward
            ep_ret += reward
            obs = next_obs
            i += 1
        if done:
            episode_returns.append(ep_ret)
        else:
            partial_return = ep_ret
    gen_return = float(np.mean(episode_returns)) if episode_returns else partial_return
    return Dataset(spec.env_id, quality, states, actions, next_states,
                   rewards, seed, gen_return)
