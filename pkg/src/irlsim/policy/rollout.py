"""Short branched rollouts inside the learned virtual environment."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..simulator import models as md

EXPLOSION_FACTOR = 100.0
RANGE_FLOOR = 1e-3


def virtual_rollout(transition_model, reward_model, actor, data, k: int,
                    rng: np.random.Generator, *,
                    state_ranges: np.ndarray | None = None) -> tuple:
    """k chained virtual steps from a dataset start state.

    Each step: action from the actor, next state from a uniformly random
    ensemble member, reward from the learned reward. Returns
    (list of (s, a, r, s2), truncated) where truncated flags an early stop by
    the state-explosion guard.
    """
    if k < 1:
        raise ConfigurationError("rollout horizon must be >= 1")
    if state_ranges is None:
        state_ranges = data.state_ranges()
    limit = EXPLOSION_FACTOR * np.maximum(state_ranges, RANGE_FLOOR)
    start = data.sample_batch(1, rng)
    s = start.states[0]
    tuples = []
    for _ in range(k):
        a = np.asarray(actor.act(s, rng), dtype=np.float64)
        member = int(rng.integers(0, transition_model.size))
        noise = rng.standard_normal(transition_model.state_dim)
        s2 = md.transition_sample(transition_model, member, s, a, noise)
        r = float(md.reward_eval(reward_model, s, s2)[0])
        if not np.all(np.isfinite(s2)) or np.any(np.abs(s2) > limit):
            return tuples, True
        tuples.append((s, a, r, s2))
        s = s2
    return tuples, False
