"""Stage-1 training loop: alternating descent-ascent, plus margin selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..numerics.adam import AdamState, adam_step
from . import losses as ls
from . import models as md
from .models import RewardModel, TransitionModel


@dataclass
class SimTrainConfig:
    alpha: float = 0.1               # entropy weight
    beta: float = 2.0                # margin penalty weight
    margin: float | None = None      # absolute margin m (multi mode)
    lr: float = 1e-3
    batch_size: int = 256
    iterations: int = 30_000
    reward_updates_per_transition_update: int = 1
    seed: int = 0
    ensemble_size: int = 7
    transition_layers: int = 7
    reward_layers: int = 4
    hidden: int = 32
    activation: str = "tanh"
    log_every: int = 100
    checkpoint_every: int = 500      # divergence-guard snapshot cadence

    def validate(self) -> None:
        if self.alpha < 0:
            raise ConfigurationError("alpha must be >= 0")
        if self.beta <= 0:
            raise ConfigurationError("beta must be > 0")
        if self.margin is not None and self.margin < 0:
            raise ConfigurationError("margin must be >= 0")
        if self.lr <= 0 or self.batch_size <= 0 or self.iterations <= 0:
            raise ConfigurationError("lr, batch_size, iterations must be positive")
        if self.reward_updates_per_transition_update < 1:
            raise ConfigurationError("reward update ratio must be >= 1")


@dataclass
class SimTrainLog:
    iterations: list = field(default_factory=list)
    data_reward: list = field(default_factory=list)
    rollout_reward: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    penalty: list = field(default_factory=list)
    reward_loss: list = field(default_factory=list)
    transition_loss: list = field(default_factory=list)
    mode: str = "single"
    aborted_at: int | None = None

    def summary(self) -> dict:
        last = -1 if self.iterations else None
        return {
            "mode": self.mode,
            "iterations_run": self.iterations[last] + 1 if last is not None else 0,
            "final_data_reward": self.data_reward[last] if last is not None else None,
            "final_rollout_reward": self.rollout_reward[last] if last is not None else None,
            "final_entropy": self.entropy[last] if last is not None else None,
            "final_penalty": self.penalty[last] if last is not None else None,
            "aborted_at": self.aborted_at,
        }


def train_simulator(config: SimTrainConfig, expert_data, diverse_data=None):
    """Joint adversarial fit; returns (TransitionModel, RewardModel, log).

    Single-dataset mode samples the expert set; with ``diverse_data`` the
    stratified mixed loss with the ReLU margin penalty is used (``config.margin``
    required). Aborts back to the last finite snapshot on divergence.
    """
    config.validate()
    multi = diverse_data is not None
    if multi and config.margin is None:
        raise ConfigurationError("multi-dataset training requires a margin")

    if multi:
        from ..data.datasets import mix  # local import keeps module deps one-way
        data = mix(expert_data, diverse_data)
        states = np.concatenate([expert_data.states, diverse_data.states])
        actions = np.concatenate([expert_data.actions, diverse_data.actions])
        next_states = np.concatenate([expert_data.next_states,
                                      diverse_data.next_states])
    else:
        data = expert_data
        states, actions, next_states = (expert_data.states, expert_data.actions,
                                        expert_data.next_states)

    rng = np.random.default_rng(config.seed)
    stats = md.normalization_stats(states, actions, next_states)
    tmodel = md.make_transition_model(
        expert_data.state_dim, expert_data.action_dim,
        ensemble_size=config.ensemble_size, layers=config.transition_layers,
        hidden=config.hidden, activation=config.activation, stats=stats, rng=rng)
    rmodel = md.make_reward_model(
        expert_data.state_dim, layers=config.reward_layers, hidden=config.hidden,
        activation=config.activation, rng=rng)

    t_params = tmodel.parameters()
    r_params = rmodel.parameters()
    t_opt = AdamState.for_params(t_params)
    r_opt = AdamState.for_params(r_params)

    log = SimTrainLog(mode="multi" if multi else "single")
    snapshot = (tmodel.copy(), rmodel.copy())

    for it in range(config.iterations):
        if multi:
            batch = data.sample_stratified(config.batch_size, rng)
        else:
            batch = data.sample_batch(config.batch_size, rng)

        r_diag = {}
        finite = True
        for _ in range(config.reward_updates_per_transition_update):
            noise = ls.draw_rollout_noise(rng, batch.size, tmodel.size,
                                          tmodel.state_dim)
            r_val, r_grads, r_diag = ls.reward_loss(
                rmodel, tmodel, batch,
                noise, mode="multi" if multi else "single",
                margin=config.margin, beta=config.beta)
            if not np.isfinite(r_val):
                finite = False
                break
            adam_step(r_opt, r_params, r_grads, config.lr)

        t_val, t_diag = np.nan, {}
        if finite:
            noise = ls.draw_rollout_noise(rng, batch.size, tmodel.size,
                                          tmodel.state_dim)
            t_val, t_grads, t_diag = ls.transition_loss(tmodel, rmodel, batch,
                                                        noise, config.alpha)
            if np.isfinite(t_val):
                adam_step(t_opt, t_params, t_grads, config.lr)
            else:
                finite = False

        if not finite:
            tmodel, rmodel = snapshot
            log.aborted_at = it
            break

        if it % config.log_every == 0 or it == config.iterations - 1:
            log.iterations.append(it)
            log.data_reward.append(r_diag.get("data_reward", np.nan))
            log.rollout_reward.append(r_diag.get("rollout_reward", np.nan))
            log.entropy.append(t_diag.get("entropy", np.nan))
            log.penalty.append(r_diag.get("penalty", 0.0))
            log.reward_loss.append(r_val)
            log.transition_loss.append(t_val)
        if (it + 1) % config.checkpoint_every == 0:
            snapshot = (tmodel.copy(), rmodel.copy())

    return tmodel, rmodel, log


def fit_transition_nll(config: SimTrainConfig, data) -> TransitionModel:
    """Supervised low-variance dynamics fit (no reward, no entropy bonus)."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    if hasattr(data, "expert"):
        states = np.concatenate([data.expert.states, data.diverse.states])
        actions = np.concatenate([data.expert.actions, data.diverse.actions])
        next_states = np.concatenate([data.expert.next_states,
                                      data.diverse.next_states])
        state_dim, action_dim = data.state_dim, data.action_dim
    else:
        states, actions, next_states = data.states, data.actions, data.next_states
        state_dim, action_dim = data.state_dim, data.action_dim
    stats = md.normalization_stats(states, actions, next_states)
    tmodel = md.make_transition_model(
        state_dim, action_dim, ensemble_size=config.ensemble_size,
        layers=config.transition_layers, hidden=config.hidden,
        activation=config.activation, stats=stats, rng=rng)
    params = tmodel.parameters()
    opt = AdamState.for_params(params)
    for _ in range(config.iterations):
        batch = data.sample_batch(config.batch_size, rng)
        _, grads, _ = ls.nll_loss(tmodel, batch)
        adam_step(opt, params, grads, config.lr)
    return tmodel


# ---------------------------------------------------------------------------
# margin selection
# ---------------------------------------------------------------------------

MARGIN_GRID = tuple(round(0.2 * i, 1) for i in range(1, 10))  # 0.2 .. 1.8
HIST_BINS = 41
TIER_DEFAULT_C = {"random": 1.6, "medium": 0.8, "expert": 0.8}
RELIABLE_GAP_FRACTION = 0.05


@dataclass
class MarginSelection:
    max_abs_reward: float          # R over expert evaluations
    margin: float                  # chosen m
    c: float                       # multiple of R
    gap: float                     # mean expert reward - mean diverse reward
    reliable: bool
    hist_expert: np.ndarray
    hist_diverse: np.ndarray
    bin_edges: np.ndarray


def select_margin(reward_model: RewardModel, expert_data, diverse_data,
                  grid=MARGIN_GRID, c: float | None = None) -> MarginSelection:
    """Scale the margin off the expert-only reward's observed magnitude R.

    Default multiple: 1.6 R against random-tier diverse data, 0.8 R against
    medium-tier; always within (0, 2R). A near-zero expert/diverse reward gap
    flags the selection as unreliable (e.g. diverse duplicates expert).
    """
    r_expert = md.reward_eval(reward_model, expert_data.states,
                              expert_data.next_states)
    r_diverse = md.reward_eval(reward_model, diverse_data.states,
                               diverse_data.next_states)
    r_max = float(np.abs(r_expert).max())
    if c is None:
        c = TIER_DEFAULT_C.get(diverse_data.quality, 0.8)
    if grid:
        c = float(min(grid, key=lambda g: abs(g - c)))
    if not 0.0 < c < 2.0:
        raise ConfigurationError(f"margin multiple must lie in (0, 2), got {c}")
    gap = float(r_expert.mean() - r_diverse.mean())
    reliable = r_max > 0.0 and gap > RELIABLE_GAP_FRACTION * r_max
    edges = np.linspace(-1.0, 1.0, HIST_BINS + 1)
    hist_e, _ = np.histogram(r_expert, bins=edges)
    hist_d, _ = np.histogram(r_diverse, bins=edges)
    return MarginSelection(r_max, c * r_max, c, gap, reliable, hist_e, hist_d,
                           edges)
