"""Adversarial losses for the joint reward / transition optimization.

The reward is pushed down on model-generated transitions and up on dataset
transitions, with a convex 0.5 * r^2 stabilizer; in multi-dataset mode a soft
ReLU penalty enforces a reward margin between expert and diverse data. The
transition ensemble ascends reward on its own samples plus a closed-form
Gaussian entropy bonus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, NumericalError
from ..numerics import tape as tp
from ..numerics.gaussian import LOG_TWO_PI
from ..numerics.tape import Tape
from . import models as md
from .models import RewardModel, TransitionModel

ENTROPY_CONST = 0.5 * (LOG_TWO_PI + 1.0)


@dataclass
class RolloutNoise:
    """Frozen randomness for one batch of model rollouts."""

    members: np.ndarray  # (B,) int member assignment
    eps: np.ndarray      # (B, state_dim) standard normal


def draw_rollout_noise(rng: np.random.Generator, batch_size: int,
                       ensemble_size: int, state_dim: int) -> RolloutNoise:
    return RolloutNoise(rng.integers(0, ensemble_size, size=batch_size),
                        rng.standard_normal((batch_size, state_dim)))


def relu_margin_penalty(mean_r_expert: float, mean_r_diverse: float,
                        margin: float, beta: float) -> float:
    """beta * max(0, E_D[r] + m - E_E[r]); subgradient 0 at the kink."""
    return beta * max(0.0, mean_r_diverse + margin - mean_r_expert)


def transition_entropy_term(model: TransitionModel, states: np.ndarray,
                            actions: np.ndarray, tape: Tape | None = None, *,
                            watch: bool = True):
    """Mean over batch and members of the predicted-delta Gaussian entropy.

    Entropy is taken in denormalized space: log(delta_std) joins the
    per-dimension log-stds (a constant offset in the parameters).
    """
    if tape is None:
        tape = Tape()
        watch = False
    _, log_std = md.all_members_forward(model, states, actions, tape, watch=watch)
    log_delta = np.log(model.stats.delta_std)
    per_row = tp.reduce_sum(tp.add(tp.add(log_std, tp.constant(log_delta)),
                                   ENTROPY_CONST), axis=-1)
    flat = tp.reshape(per_row, (-1,))
    return tp.reduce_mean(flat)


def reward_loss(reward_model: RewardModel, transition_model: TransitionModel,
                batch, noise: RolloutNoise, mode: str = "single",
                margin: float | None = None, beta: float | None = None):
    """Loss minimized by the reward parameters; returns (value, grads, diag).

    The rollout term pushes the same (s, a) support through the transition
    model (frozen here); only the next states differ between the two terms.
    """
    if mode not in ("single", "multi"):
        raise ConfigurationError(f"unknown reward loss mode {mode!r}")
    if mode == "multi":
        if batch.is_expert is None or not batch.is_expert.any() \
                or batch.is_expert.all():
            raise ConfigurationError(
                "multi mode requires a mixed batch with expert and diverse rows")
        if margin is None or beta is None:
            raise ConfigurationError("multi mode requires margin and beta")
    s, a, s2 = batch.states, batch.actions, batch.next_states
    s2_model = md.sample_next_states(transition_model, noise.members, s, a,
                                     noise.eps)

    tape = Tape()
    r_roll = md.reward_forward(reward_model, s, s2_model, tape)
    r_real = md.reward_forward(reward_model, s, s2, tape)
    roll_mean = tp.reduce_mean(r_roll)
    real_mean = tp.reduce_mean(r_real)
    both = tp.concat([r_roll, r_real], axis=-1)
    psi = tp.mul(tp.reduce_mean(tp.square(both)), 0.5)
    loss = tp.add(tp.sub(roll_mean, real_mean), psi)

    diag = {
        "rollout_reward": float(roll_mean.value),
        "data_reward": float(real_mean.value),
        "psi": float(psi.value),
        "penalty": 0.0,
    }
    if mode == "multi":
        idx_e = np.flatnonzero(batch.is_expert)
        idx_d = np.flatnonzero(~batch.is_expert)
        mean_e = tp.reduce_mean(tp.take_rows(r_real, idx_e))
        mean_d = tp.reduce_mean(tp.take_rows(r_real, idx_d))
        gap_arg = tp.add(tp.sub(mean_d, mean_e), margin)
        penalty = tp.mul(tp.relu(gap_arg), beta)
        loss = tp.add(loss, penalty)
        diag["penalty"] = float(penalty.value)
        diag["expert_reward"] = float(mean_e.value)
        diag["diverse_reward"] = float(mean_d.value)
    tape.backward(loss)
    grads = [tape.grad_for(p) for p in reward_model.parameters()]
    return float(loss.value), grads, diag


def transition_loss(transition_model: TransitionModel,
                    reward_model: RewardModel, batch, noise: RolloutNoise,
                    alpha: float):
    """Negated ascent objective for the ensemble; returns (value, grads, diag).

    Minimizing the returned value maximizes alpha * entropy + mean reward of
    reparameterized model samples. Reward parameters stay frozen; gradients
    reach the ensemble through the sampled next states.
    """
    s, a = batch.states, batch.actions
    b = s.shape[0]
    tape = Tape()
    mean, log_std = md.all_members_forward(transition_model, s, a, tape)

    # entropy over all members and rows, denormalized
    log_delta = np.log(transition_model.stats.delta_std)
    ent_rows = tp.reduce_sum(tp.add(tp.add(log_std, tp.constant(log_delta)),
                                    ENTROPY_CONST), axis=-1)
    entropy = tp.reduce_mean(tp.reshape(ent_rows, (-1,)))

    # reparameterized rollout through the per-row member assignment
    mean_sel = tp.select_member(mean, noise.members)
    log_std_sel = tp.select_member(log_std, noise.members)
    delta = tp.mul(tp.add(mean_sel, tp.mul(tp.exp(log_std_sel),
                                           tp.constant(noise.eps))),
                   tp.constant(transition_model.stats.delta_std))
    s2_model = tp.add(tp.constant(s), delta)
    r_roll = md.reward_forward(reward_model, s, s2_model, tape, watch=False)
    roll_mean = tp.reduce_mean(r_roll)

    objective = tp.add(tp.mul(entropy, alpha), roll_mean)
    loss = tp.neg(objective)
    tape.backward(loss)
    grads = [tape.grad_for(p) for p in transition_model.parameters()]
    diag = {
        "entropy": float(entropy.value),
        "rollout_reward": float(roll_mean.value),
    }
    return float(loss.value), grads, diag


def nll_loss(transition_model: TransitionModel, batch):
    """Supervised Gaussian NLL of dataset deltas (low-variance dynamics fit).

    All members fit the same batch; returns (value, grads, diag).
    """
    s, a, s2 = batch.states, batch.actions, batch.next_states
    target = (s2 - s) / transition_model.stats.delta_std
    k = transition_model.size
    target_k = np.broadcast_to(target, (k,) + target.shape).copy()
    tape = Tape()
    mean, log_std = md.all_members_forward(transition_model, s, a, tape)
    z = tp.mul(tp.sub(tp.constant(target_k), mean), tp.exp(tp.neg(log_std)))
    per_dim = tp.add(tp.mul(tp.square(z), 0.5),
                     tp.add(log_std, 0.5 * LOG_TWO_PI))
    loss = tp.reduce_mean(tp.reshape(tp.reduce_sum(per_dim, axis=-1), (-1,)))
    tape.backward(loss)
    if not np.isfinite(loss.value):
        raise NumericalError("non-finite dynamics NLL")
    grads = [tape.grad_for(p) for p in transition_model.parameters()]
    return float(loss.value), grads, {"nll": float(loss.value)}
