"""Soft actor-critic with twin targets and auto-tuned temperature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from ..numerics import tape as tp
from ..numerics.adam import AdamState, adam_step
from ..numerics.gaussian import (DiagonalGaussian, gaussian_log_prob,
                                 tanh_squash_log_prob_np)
from ..numerics.mlp import TANH_CLIP
from ..numerics.tape import Tape
from .imitation import expert_nll_term
from .networks import (CriticPair, GaussianPolicy, make_critic_pair,
                       make_gaussian_policy, policy_dist, polyak_update,
                       q_eval, q_value, squash_actions)


@dataclass
class TemperatureState:
    """log of the entropy temperature plus its optimizer state."""

    log_temp: np.ndarray
    opt: AdamState
    target_entropy: float

    @property
    def value(self) -> float:
        return float(np.exp(self.log_temp))


@dataclass
class SacAgent:
    policy: GaussianPolicy
    critics: CriticPair
    temperature: TemperatureState
    policy_opt: AdamState
    critic_opt: AdamState
    lr: float = 1e-3

    def act(self, obs, rng=None, deterministic: bool = False):
        return self.policy.act(obs, rng, deterministic)

    def snapshot_actor(self) -> GaussianPolicy:
        return self.policy.copy()


def make_sac_agent(state_dim: int, action_low, action_high, *, lr: float = 1e-3,
                   tau: float = 0.005, hidden: int = 32, layers: int = 4,
                   target_entropy: float | None = None,
                   rng: np.random.Generator | None = None) -> SacAgent:
    if rng is None:
        rng = np.random.default_rng(0)
    policy = make_gaussian_policy(state_dim, action_low, action_high,
                                  layers=layers, hidden=hidden, rng=rng)
    critics = make_critic_pair(state_dim, policy.action_dim, layers=layers,
                               hidden=hidden, tau=tau, rng=rng)
    if target_entropy is None:
        target_entropy = -float(policy.action_dim)
    log_temp = np.zeros(())
    temperature = TemperatureState(log_temp, AdamState.for_params([log_temp]),
                                   target_entropy)
    return SacAgent(policy, critics,
                    temperature,
                    AdamState.for_params(policy.parameters()),
                    AdamState.for_params(critics.parameters()),
                    lr)


def sac_update(agent: SacAgent, batch: tuple, gamma: float, lam: float,
               expert_batch, rng: np.random.Generator) -> dict:
    """One full update (critics, actor incl. imitation term, temperature).

    ``batch`` is (s, a, r, s2) arrays; ``expert_batch`` supplies the
    regularizer support and may be None when ``lam == 0``. Virtual rollouts
    never terminate, so bootstrapping always continues.
    """
    s, a, r, s2 = batch
    temp = agent.temperature.value
    policy, critics = agent.policy, agent.critics

    # --- critic targets (no gradients needed) ---
    mean2, log_std2 = policy.dist_eval(s2)
    u2 = mean2 + np.exp(log_std2) * rng.standard_normal(mean2.shape)
    a2 = policy.center + policy.scale * np.tanh(np.clip(u2, -TANH_CLIP, TANH_CLIP))
    logp2 = tanh_squash_log_prob_np(mean2, log_std2, u2) \
        - float(np.log(policy.scale).sum())
    q_t = np.minimum(q_eval(critics.target1, s2, a2),
                     q_eval(critics.target2, s2, a2))
    y = r + gamma * (q_t - temp * logp2)

    # --- critic step ---
    tape = Tape()
    q1 = q_value(critics.q1, s, a, tape)
    q2 = q_value(critics.q2, s, a, tape)
    critic_loss = tp.add(tp.reduce_mean(tp.square(tp.sub(q1, y))),
                         tp.reduce_mean(tp.square(tp.sub(q2, y))))
    tape.backward(critic_loss)
    critic_grads = [tape.grad_for(p) for p in critics.parameters()]
    adam_step(agent.critic_opt, critics.parameters(), critic_grads, agent.lr)

    # --- actor step ---
    tape = Tape()
    dist = policy_dist(policy, s, tape)
    eps = rng.standard_normal((s.shape[0], policy.action_dim))
    u = tp.add(dist.mean, tp.mul(tp.exp(dist.log_std), tp.constant(eps)))
    t_u = tp.tanh(tp.clip(u, -TANH_CLIP, TANH_CLIP))
    a_pi = tp.add(tp.mul(t_u, tp.constant(policy.scale)),
                  tp.constant(policy.center))
    base = gaussian_log_prob(dist, u)
    corr = tp.reduce_sum(tp.log(tp.add(tp.sub(1.0, tp.square(t_u)), 1e-6)),
                         axis=-1)
    logp = tp.sub(tp.sub(base, corr), float(np.log(policy.scale).sum()))
    q_pi = tp.minimum(q_value(critics.q1, tp.constant(s), a_pi, tape, watch=False),
                      q_value(critics.q2, tp.constant(s), a_pi, tape, watch=False))
    actor_loss = tp.reduce_mean(tp.sub(tp.mul(logp, temp), q_pi))
    kl_value = 0.0
    if lam != 0.0:
        if expert_batch is None:
            raise NumericalError("imitation weight set but no expert batch given")
        kl = expert_nll_term(policy, expert_batch.states, expert_batch.actions,
                             tape)
        kl_value = float(kl.value)
        actor_loss = tp.add(actor_loss, tp.mul(kl, lam))
    if not np.isfinite(actor_loss.value):
        raise NumericalError("non-finite actor loss")
    tape.backward(actor_loss)
    actor_grads = [tape.grad_for(p) for p in policy.parameters()]
    adam_step(agent.policy_opt, policy.parameters(), actor_grads, agent.lr)

    # --- temperature step (analytic gradient in log_temp) ---
    logp_mean = float(logp.value.mean())
    temp_grad = -(logp_mean + agent.temperature.target_entropy)
    adam_step(agent.temperature.opt, [agent.temperature.log_temp],
              [np.asarray(temp_grad)], agent.lr)

    polyak_update(critics)

    return {
        "critic_loss": float(critic_loss.value),
        "actor_loss": float(actor_loss.value),
        "kl": kl_value,
        "temperature": agent.temperature.value,
        "mean_log_prob": logp_mean,
        "mean_q": float(q_pi.value.mean()),
        "mean_target": float(y.mean()),
    }
