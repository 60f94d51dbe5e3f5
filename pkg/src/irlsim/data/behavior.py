"""Behavior policies for dataset generation.

Online soft actor-critic on the true environment (this is the only place the
true reward feeds training). The expert tier is the final policy; the medium
tier is the earliest checkpoint whose normalized score reaches half of the
expert's. Returns in these environments are negative by construction, so
return ratios are taken on the random-baseline-normalized scale
(score = (ret - random) / (expert - random)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import envs
from ..errors import IrlsimError
from ..policy.replay import ReplayBuffer
from ..policy.sac import make_sac_agent, sac_update

BEHAVIOR_EPISODES = {"pointmass": 80, "pendulum": 200}
CHECKPOINT_EVERY = 20
WARMUP_STEPS = 400
EVAL_EPISODES = 5


class BehaviorTrainingError(IrlsimError):
    """Raised when a tier cannot be produced within budget."""


@dataclass
class BehaviorSuite:
    expert: object
    medium: object
    expert_return: float
    medium_return: float
    medium_score: float           # normalized in [0.5, 1.0) on success
    random_return: float
    checkpoint_episodes: list = field(default_factory=list)
    checkpoint_returns: list = field(default_factory=list)


def _eval_policy(spec, actor_fn, episodes: int, seed_key) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    return float(np.mean([envs.episode_return(spec, actor_fn, rng)
                          for _ in range(episodes)]))


def random_policy_return(spec, seed: int = 0, episodes: int = 20) -> float:
    return _eval_policy(spec, envs.random_actor(spec), episodes, [seed, 99991])


def train_sac_on_env(spec, seed: int, episodes: int, *, lr: float = 1e-3,
                     batch_size: int = 128, warmup_steps: int = WARMUP_STEPS,
                     checkpoint_every: int = CHECKPOINT_EVERY,
                     eval_episodes: int = EVAL_EPISODES):
    """Plain online SAC; returns (agent, checkpoints, checkpoint_returns).

    Checkpoints are actor snapshots taken every ``checkpoint_every`` episodes
    together with a deterministic-action evaluation return.
    """
    rng = np.random.default_rng(seed)
    agent = make_sac_agent(spec.state_dim, spec.action_low, spec.action_high,
                           lr=lr, rng=rng)
    buffer = ReplayBuffer(episodes * spec.horizon + 1, spec.state_dim,
                          spec.action_dim)
    checkpoints, checkpoint_eps, checkpoint_rets = [], [], []
    total_steps = 0
    for episode in range(episodes):
        state = envs.reset(spec, rng)
        obs = envs.observe(spec, state)
        done = False
        while not done:
            if total_steps < warmup_steps:
                action = rng.uniform(spec.action_low, spec.action_high)
            else:
                action = agent.act(obs, rng)
            state, reward, done = envs.step(spec, state, action)
            next_obs = envs.observe(spec, state)
            buffer.add(obs, action, reward, next_obs)
            obs = next_obs
            total_steps += 1
            if len(buffer) >= batch_size and total_steps >= warmup_steps:
                sac_update(agent, buffer.sample(batch_size, rng), 0.99, 0.0,
                           None, rng)
        if (episode + 1) % checkpoint_every == 0:
            snap = agent.snapshot_actor()
            ret = _eval_policy(
                spec, lambda o, g: snap.act(o, deterministic=True),
                eval_episodes, [seed, 4241, episode])
            checkpoints.append(snap)
            checkpoint_eps.append(episode)
            checkpoint_rets.append(ret)
    return agent, (checkpoint_eps, checkpoints, checkpoint_rets)


def train_behavior_suite(spec, seed: int, *, episodes: int | None = None,
                         eval_episodes: int = 20) -> BehaviorSuite:
    """Train the expert and pick the half-score checkpoint as the medium tier."""
    if episodes is None:
        episodes = BEHAVIOR_EPISODES.get(spec.env_id, 100)
    agent, (ck_eps, ck_policies, ck_rets) = train_sac_on_env(spec, seed, episodes)
    expert = agent.snapshot_actor()
    expert_return = _eval_policy(
        spec, lambda o, g: expert.act(o, deterministic=True), eval_episodes,
        [seed, 17])
    random_return = random_policy_return(spec, seed)
    span = expert_return - random_return
    if span <= 0:
        raise BehaviorTrainingError(
            f"{spec.env_id}: expert ({expert_return:.1f}) did not beat the "
            f"random baseline ({random_return:.1f})")

    def score(ret: float) -> float:
        return (ret - random_return) / span

    medium = None
    medium_return = medium_score = None
    for ep, pol, ret in zip(ck_eps, ck_policies, ck_rets):
        sc = score(ret)
        if 0.5 <= sc < 1.0:
            medium, medium_return, medium_score = pol, ret, sc
            break
    if medium is None:
        # fall back to the earliest checkpoint at or above half score
        for ep, pol, ret in zip(ck_eps, ck_policies, ck_rets):
            if score(ret) >= 0.5:
                medium, medium_return, medium_score = pol, ret, score(ret)
                break
    if medium is None:
        raise BehaviorTrainingError(
            f"{spec.env_id}: no checkpoint reached half of the expert's "
            f"normalized score within {episodes} episodes")
    return BehaviorSuite(expert, medium, expert_return, medium_return,
                         medium_score, random_return, ck_eps, ck_rets)
