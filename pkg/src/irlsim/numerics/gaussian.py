"""Diagonal Gaussian math: reparameterized samples, densities, entropy.

All functions take ``Var`` or plain arrays and return a ``Var`` (constant when
nothing is tracked). Batched inputs (B, d) reduce over the last axis to (B,);
single vectors (d,) reduce to a scalar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tape as tp
from .mlp import LOG_STD_MAX, LOG_STD_MIN  # re-exported clamp range
from .tape import Var

LOG_TWO_PI = float(np.log(2.0 * np.pi))
SQUASH_EPS = 1e-6


@dataclass
class DiagonalGaussian:
    """mean and log_std may be Vars (tracked) or plain arrays."""

    mean: object
    log_std: object


def gaussian_rsample(g: DiagonalGaussian, noise) -> Var:
    """mean + exp(log_std) * noise; differentiable in mean and log_std."""
    return tp.add(g.mean, tp.mul(tp.exp(g.log_std), tp.constant(noise)))


def gaussian_log_prob(g: DiagonalGaussian, x) -> Var:
    """Sum over the last axis of the per-dimension normal log densities."""
    z = tp.mul(tp.sub(x, g.mean), tp.exp(tp.neg(g.log_std)))
    per_dim = tp.sub(tp.mul(tp.square(z), -0.5),
                     tp.add(g.log_std, 0.5 * LOG_TWO_PI))
    return tp.reduce_sum(per_dim, axis=-1)


def gaussian_entropy(g: DiagonalGaussian) -> Var:
    """Closed-form differential entropy, summed over the last axis."""
    per_dim = tp.add(g.log_std, 0.5 * (LOG_TWO_PI + 1.0))
    return tp.reduce_sum(per_dim, axis=-1)


def tanh_squash_log_prob(g: DiagonalGaussian, pre_tanh) -> Var:
    """Log density of tanh(u) with u ~ g, evaluated at u = pre_tanh."""
    base = gaussian_log_prob(g, pre_tanh)
    t = tp.tanh(pre_tanh)
    corr = tp.reduce_sum(tp.log(tp.add(tp.sub(1.0, tp.square(t)), SQUASH_EPS)),
                         axis=-1)
    return tp.sub(base, corr)


# numpy fast paths for hot loops ---------------------------------------------

def gaussian_log_prob_np(mean: np.ndarray, log_std: np.ndarray,
                         x: np.ndarray) -> np.ndarray:
    z = (x - mean) * np.exp(-log_std)
    per_dim = -0.5 * z * z - log_std - 0.5 * LOG_TWO_PI
    return per_dim.sum(axis=-1)


def tanh_squash_log_prob_np(mean: np.ndarray, log_std: np.ndarray,
                            pre_tanh: np.ndarray) -> np.ndarray:
    t = np.tanh(pre_tanh)
    corr = np.log(1.0 - t * t + SQUASH_EPS).sum(axis=-1)
    return gaussian_log_prob_np(mean, log_std, pre_tanh) - corr
