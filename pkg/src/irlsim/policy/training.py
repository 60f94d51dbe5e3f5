"""Stage-2 loop: fill the buffer with virtual rollouts, update, evaluate."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import envs
from ..errors import ConfigurationError
from .ddpg import DdpgAgent, ddpg_update, make_ddpg_agent
from .replay import ReplayBuffer
from .rollout import virtual_rollout
from .sac import SacAgent, make_sac_agent, sac_update

ALGORITHMS = ("sac", "ddpg")


@dataclass
class PolicyTrainConfig:
    gamma: float = 0.99
    lam: float = 1.0                 # imitation regularizer weight
    tau: float = 0.005
    rollout_horizon: int = 5
    episodes: int = 10_000
    grad_steps: int = 5              # gradient steps per episode
    batch_size: int = 256
    lr: float = 1e-3
    algorithm: str = "sac"
    seed: int = 0
    replay_capacity: int = 1_000_000
    eval_interval: int = 100         # episodes between true-env evaluations
    eval_episodes: int = 20
    exploration_noise: float = 0.1   # deterministic backbone only
    hidden: int = 32
    policy_layers: int = 4
    critic_layers: int = 4
    target_entropy: float | None = None

    def validate(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigurationError("gamma must lie in [0, 1)")
        if self.rollout_horizon < 1:
            raise ConfigurationError("rollout horizon must be >= 1")
        if self.lam < 0:
            raise ConfigurationError("imitation weight must be >= 0")
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        if self.episodes <= 0 or self.grad_steps < 0 or self.batch_size <= 0:
            raise ConfigurationError("episodes/grad_steps/batch_size invalid")


@dataclass
class PolicyTrainLog:
    eval_episodes: list = field(default_factory=list)
    eval_returns: list = field(default_factory=list)
    best_return: float = -np.inf
    best_episode: int = -1
    truncations: int = 0
    buffer_final: int = 0
    diagnostics: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "best_return": self.best_return,
            "best_episode": self.best_episode,
            "truncations": self.truncations,
            "buffer_final": self.buffer_final,
            "eval_episodes": list(self.eval_episodes),
            "eval_returns": list(self.eval_returns),
        }


def _eval_actor(spec, actor, episodes: int, seed_key) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    rets = [envs.episode_return(spec, lambda o, g: actor.act(o, deterministic=True),
                                rng) for _ in range(episodes)]
    return float(np.mean(rets))


def train_policy(config: PolicyTrainConfig, transition_model, reward_model,
                 data) -> tuple:
    """Train a policy entirely inside the learned models; returns (agent, log).

    ``data`` is a dataset or mixed dataset: start states come from all of it,
    the imitation term samples the expert part only. The best true-environment
    evaluation snapshot is loaded back into the agent before returning.
    """
    config.validate()
    spec = envs.make_spec(data.env_id)
    expert_data = data.expert if hasattr(data, "expert") else data
    rng = np.random.default_rng(config.seed)

    if config.algorithm == "sac":
        agent = make_sac_agent(spec.state_dim, spec.action_low, spec.action_high,
                               lr=config.lr, tau=config.tau, hidden=config.hidden,
                               layers=config.policy_layers,
                               target_entropy=config.target_entropy, rng=rng)
    else:
        agent = make_ddpg_agent(spec.state_dim, spec.action_low, spec.action_high,
                                lr=config.lr, tau=config.tau, hidden=config.hidden,
                                layers=config.policy_layers,
                                exploration_noise=config.exploration_noise,
                                rng=rng)

    buffer = ReplayBuffer(config.replay_capacity, spec.state_dim,
                          spec.action_dim)
    ranges = data.state_ranges()
    log = PolicyTrainLog()
    best_params = None

    for episode in range(config.episodes):
        tuples, truncated = virtual_rollout(transition_model, reward_model,
                                            agent, data, config.rollout_horizon,
                                            rng, state_ranges=ranges)
        if truncated:
            log.truncations += 1
        for s, a, r, s2 in tuples:
            buffer.add(s, a, r, s2)

        if len(buffer) >= config.batch_size:
            for _ in range(config.grad_steps):
                batch = buffer.sample(config.batch_size, rng)
                expert_batch = expert_data.sample_batch(config.batch_size, rng) \
                    if config.lam != 0.0 else None
                if config.algorithm == "sac":
                    diag = sac_update(agent, batch, config.gamma, config.lam,
                                      expert_batch, rng)
                else:
                    diag = ddpg_update(agent, batch, config.gamma, config.lam,
                                       expert_batch)

        if (episode + 1) % config.eval_interval == 0 \
                or episode == config.episodes - 1:
            ret = _eval_actor(spec, agent, config.eval_episodes,
                              [config.seed, 7919, episode])
            log.eval_episodes.append(episode)
            log.eval_returns.append(ret)
            log.diagnostics.append(diag if len(buffer) >= config.batch_size else {})
            if ret > log.best_return:
                log.best_return = ret
                log.best_episode = episode
                best_params = [p.copy() for p in agent.policy.parameters()]

    if best_params is not None:
        for p, best in zip(agent.policy.parameters(), best_params):
            p[:] = best
    log.buffer_final = len(buffer)
    return agent, log
