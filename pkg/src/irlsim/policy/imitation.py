"""Expert-action likelihood: the policy regularizer and the cloning baseline.

In continuous spaces the empirical expert policy is a set of (s, a) samples,
so aligning the learned policy with it reduces to the negative log-likelihood
of dataset actions under the current squashed Gaussian; the expert's own
entropy term is parameter-independent and dropped. The behavior-cloning loss
is by construction the identical quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..numerics import tape as tp
from ..numerics.adam import AdamState, adam_step
from ..numerics.tape import Tape, Var
from .networks import (GaussianPolicy, make_gaussian_policy, policy_dist,
                       squashed_log_prob)


def expert_nll_term(policy: GaussianPolicy, states: np.ndarray,
                    actions: np.ndarray, tape: Tape, *,
                    watch: bool = True) -> Var:
    """Tracked mean negative log-likelihood of dataset actions."""
    if states.shape[0] == 0:
        raise ConfigurationError("empty expert batch")
    pre = policy.pre_tanh_of(actions)
    dist = policy_dist(policy, states, tape, watch=watch)
    logp = squashed_log_prob(policy, dist, tp.constant(pre))
    return tp.neg(tp.reduce_mean(logp))


def kl_regularizer(policy: GaussianPolicy, expert_batch) -> tuple:
    """Value and policy gradients of the expert-action NLL.

    ``expert_batch`` is anything with .states/.actions arrays (or a (s, a)
    tuple). Shares its computation with the cloning loss, so the gradients
    coincide exactly.
    """
    if isinstance(expert_batch, tuple):
        states, actions = expert_batch
    else:
        states, actions = expert_batch.states, expert_batch.actions
    tape = Tape()
    term = expert_nll_term(policy, states, actions, tape)
    tape.backward(term)
    grads = [tape.grad_for(p) for p in policy.parameters()]
    return float(term.value), grads


@dataclass
class BcLog:
    epoch_nll: list = field(default_factory=list)


def bc_train(data, epochs: int, *, batch_size: int = 256, lr: float = 1e-3,
             layers: int = 4, hidden: int = 32, seed: int = 0,
             action_low=None, action_high=None) -> tuple:
    """Behavior cloning on a dataset (or mixed dataset); returns (policy, log).

    Action bounds default to the per-dimension data extent, symmetrized, when
    not supplied.
    """
    if epochs <= 0:
        raise ConfigurationError("epochs must be positive")
    rng = np.random.default_rng(seed)
    if hasattr(data, "expert"):
        state_dim = data.state_dim
        all_actions = np.concatenate([data.expert.actions, data.diverse.actions])
        n_total = data.expert.n + data.diverse.n
    else:
        state_dim = data.state_dim
        all_actions = data.actions
        n_total = data.n
    if action_low is None or action_high is None:
        extent = np.maximum(np.abs(all_actions).max(axis=0), 1e-3) * 1.05
        action_low, action_high = -extent, extent
    policy = make_gaussian_policy(state_dim, action_low, action_high,
                                  layers=layers, hidden=hidden, rng=rng)
    params = policy.parameters()
    opt = AdamState.for_params(params)
    log = BcLog()
    batches_per_epoch = max(1, n_total // batch_size)
    for _ in range(epochs):
        nlls = []
        for _ in range(batches_per_epoch):
            batch = data.sample_batch(batch_size, rng)
            tape = Tape()
            term = expert_nll_term(policy, batch.states, batch.actions, tape)
            tape.backward(term)
            grads = [tape.grad_for(p) for p in params]
            adam_step(opt, params, grads, lr)
            nlls.append(float(term.value))
        log.epoch_nll.append(float(np.mean(nlls)))
    return policy, log
