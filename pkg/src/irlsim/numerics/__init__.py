"""Differentiable-MLP stack: tape autodiff, Adam, Gaussian math, grad checks."""

from .adam import AdamState, adam_step
from .gaussian import (DiagonalGaussian, gaussian_entropy, gaussian_log_prob,
                       gaussian_log_prob_np, gaussian_rsample,
                       tanh_squash_log_prob, tanh_squash_log_prob_np)
from .gradcheck import finite_diff_check
from .mlp import (LOG_STD_MAX, LOG_STD_MIN, TANH_CLIP, MlpParams, init_mlp,
                  mlp_backward, mlp_eval, mlp_forward, split_gaussian_head)
from .tape import Tape, Var

__all__ = [
    "AdamState", "adam_step", "DiagonalGaussian", "gaussian_entropy",
    "gaussian_log_prob", "gaussian_log_prob_np", "gaussian_rsample",
    "tanh_squash_log_prob", "tanh_squash_log_prob_np", "finite_diff_check",
    "LOG_STD_MAX", "LOG_STD_MIN", "TANH_CLIP", "MlpParams", "init_mlp",
    "mlp_backward", "mlp_eval", "mlp_forward", "split_gaussian_head",
    "Tape", "Var",
]
