"""True-environment evaluation with deterministic (mean) actions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import envs
from ..errors import ConfigurationError


@dataclass
class EvalResult:
    mean: float
    std: float
    per_seed_means: list
    per_episode: list  # list of per-seed lists


def as_deterministic_actor(policy_like):
    """Normalize policies / agents / callables to actor(obs, rng) -> action."""
    if callable(policy_like) and not hasattr(policy_like, "act"):
        return policy_like
    if hasattr(policy_like, "act"):
        return lambda obs, rng: policy_like.act(obs, deterministic=True)
    raise ConfigurationError("cannot evaluate this object as a policy")


def evaluate(spec, policy_like, episodes: int, seeds) -> EvalResult:
    """Mean/std of undiscounted true returns over all episodes and seeds."""
    if episodes <= 0:
        raise ConfigurationError("episodes must be positive")
    if isinstance(seeds, (int, np.integer)):
        seeds = [int(seeds)]
    if not seeds:
        raise ConfigurationError("at least one evaluation seed required")
    actor = as_deterministic_actor(policy_like)
    if hasattr(policy_like, "state_dim") and policy_like.state_dim != spec.state_dim:
        raise ConfigurationError(
            f"policy expects {policy_like.state_dim}-dim observations, "
            f"environment provides {spec.state_dim}")
    per_seed_means, per_episode = [], []
    for seed in seeds:
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1047]))
        rets = [envs.episode_return(spec, actor, rng) for _ in range(episodes)]
        per_episode.append(rets)
        per_seed_means.append(float(np.mean(rets)))
    flat = [r for rs in per_episode for r in rs]
    return EvalResult(float(np.mean(flat)), float(np.std(flat)),
                      per_seed_means, per_episode)


def normalized_score(ret: float, random_return: float,
                     expert_return: float) -> float:
    """Random-baseline-normalized score; 1.0 matches the expert."""
    span = expert_return - random_return
    if span <= 0:
        raise ConfigurationError("expert return must exceed the random baseline")
    return (ret - random_return) / span
