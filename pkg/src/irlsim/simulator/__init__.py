"""Stage-1: joint adversarial training of reward and dynamics ensemble."""

from .checkpoint import (load_reward_model, load_transition_model,
                         save_reward_model, save_transition_model)
from .losses import (RolloutNoise, draw_rollout_noise, nll_loss,
                     relu_margin_penalty, reward_loss, transition_entropy_term,
                     transition_loss)
from .models import (EnsembleParams, NormalizationStats, RewardModel,
                     TransitionModel, identity_stats, make_reward_model,
                     make_transition_model, normalization_stats, predicted_std,
                     reward_eval, reward_forward, sample_next_states,
                     transition_sample)
from .training import (MARGIN_GRID, MarginSelection, SimTrainConfig,
                       SimTrainLog, fit_transition_nll, select_margin,
                       train_simulator)

__all__ = [
    "load_reward_model", "load_transition_model", "save_reward_model",
    "save_transition_model", "RolloutNoise", "draw_rollout_noise", "nll_loss",
    "relu_margin_penalty", "reward_loss", "transition_entropy_term",
    "transition_loss", "EnsembleParams", "NormalizationStats", "RewardModel",
    "TransitionModel", "identity_stats", "make_reward_model",
    "make_transition_model", "normalization_stats", "predicted_std",
    "reward_eval", "reward_forward", "sample_next_states", "transition_sample",
    "MARGIN_GRID", "MarginSelection", "SimTrainConfig", "SimTrainLog",
    "fit_transition_nll", "select_margin", "train_simulator",
]
