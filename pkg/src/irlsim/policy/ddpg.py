"""Deterministic-actor backbone with target networks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from ..numerics import tape as tp
from ..numerics.adam import AdamState, adam_step
from ..numerics.tape import Tape
from .networks import (CriticPair, DeterministicPolicy, det_actions,
                       make_critic_pair, make_deterministic_policy,
                       polyak_update, polyak_update_net, q_eval, q_value)


@dataclass
class DdpgAgent:
    policy: DeterministicPolicy
    policy_target: DeterministicPolicy
    critics: CriticPair
    policy_opt: AdamState
    critic_opt: AdamState
    lr: float = 1e-3
    exploration_noise: float = 0.1   # std as a fraction of the action scale
    tau: float = 0.005

    def act(self, obs, rng=None, deterministic: bool = False):
        return self.policy.act(obs, rng, deterministic,
                               noise_std=self.exploration_noise)

    def snapshot_actor(self) -> DeterministicPolicy:
        return self.policy.copy()


def make_ddpg_agent(state_dim: int, action_low, action_high, *, lr: float = 1e-3,
                    tau: float = 0.005, hidden: int = 32, layers: int = 4,
                    exploration_noise: float = 0.1,
                    rng: np.random.Generator | None = None) -> DdpgAgent:
    if rng is None:
        rng = np.random.default_rng(0)
    policy = make_deterministic_policy(state_dim, action_low, action_high,
                                       layers=layers, hidden=hidden, rng=rng)
    critics = make_critic_pair(state_dim, policy.action_dim, layers=layers,
                               hidden=hidden, tau=tau, rng=rng)
    return DdpgAgent(policy, policy.copy(), critics,
                     AdamState.for_params(policy.parameters()),
                     AdamState.for_params(critics.parameters()),
                     lr, exploration_noise, tau)


def ddpg_update(agent: DdpgAgent, batch: tuple, gamma: float, lam: float,
                expert_batch) -> dict:
    """One deterministic-policy update; exploration noise lives in rollouts.

    Actor ascends Q(s, pi(s)) minus lam times the squared imitation error to
    expert actions (the deterministic analog of the likelihood regularizer).
    """
    s, a, r, s2 = batch
    policy, critics = agent.policy, agent.critics

    a2 = agent.policy_target.mean_action(s2)
    q_t = np.minimum(q_eval(critics.target1, s2, a2),
                     q_eval(critics.target2, s2, a2))
    y = r + gamma * q_t

    tape = Tape()
    q1 = q_value(critics.q1, s, a, tape)
    q2 = q_value(critics.q2, s, a, tape)
    critic_loss = tp.add(tp.reduce_mean(tp.square(tp.sub(q1, y))),
                         tp.reduce_mean(tp.square(tp.sub(q2, y))))
    tape.backward(critic_loss)
    critic_grads = [tape.grad_for(p) for p in critics.parameters()]
    adam_step(agent.critic_opt, critics.parameters(), critic_grads, agent.lr)

    tape = Tape()
    a_pi = det_actions(policy, s, tape)
    q_pi = q_value(critics.q1, tp.constant(s), a_pi, tape, watch=False)
    actor_loss = tp.neg(tp.reduce_mean(q_pi))
    imitation = 0.0
    if lam != 0.0:
        if expert_batch is None:
            raise NumericalError("imitation weight set but no expert batch given")
        a_e = det_actions(policy, expert_batch.states, tape)
        err = tp.reduce_mean(tp.square(tp.sub(a_e,
                                              tp.constant(expert_batch.actions))))
        imitation = float(err.value)
        actor_loss = tp.add(actor_loss, tp.mul(err, lam))
    if not np.isfinite(actor_loss.value):
        raise NumericalError("non-finite actor loss")
    tape.backward(actor_loss)
    actor_grads = [tape.grad_for(p) for p in policy.parameters()]
    adam_step(agent.policy_opt, policy.parameters(), actor_grads, agent.lr)

    polyak_update(critics)
    polyak_update_net(policy.net, agent.policy_target.net, agent.tau)

    return {
        "critic_loss": float(critic_loss.value),
        "actor_loss": float(actor_loss.value),
        "imitation_error": imitation,
        "mean_q": float(q_pi.value.mean()),
        "mean_target": float(y.mean()),
    }
