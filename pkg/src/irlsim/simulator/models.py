"""Learned virtual-environment components.

``TransitionModel`` is a stacked ensemble of Gaussian delta-dynamics MLPs:
each member maps normalized (s, a) to a diagonal Gaussian over the normalized
state delta, and s' = s + delta_std * (mean + exp(log_std) * noise). Output
normalization is scale-only so a zero final layer is exactly the identity map
at init. ``RewardModel`` maps raw (s, s') to tanh-bounded scalars in (-1, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..numerics import mlp as mlp_mod
from ..numerics import tape as tp
from ..numerics.mlp import (LOG_STD_MAX, LOG_STD_MIN, TANH_CLIP, MlpParams,
                            init_mlp, mlp_eval, mlp_forward)
from ..numerics.tape import Tape, Var

STD_FLOOR = 1e-6


@dataclass
class EnsembleParams:
    """K stacked MLPs: weights[i] (K, out, in), biases[i] (K, out)."""

    weights: list
    biases: list
    activation: str = "tanh"
    head: str = "gaussian"

    @property
    def size(self) -> int:
        return self.weights[0].shape[0]

    def arrays(self) -> list:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def member(self, k: int) -> MlpParams:
        """View of member k as a plain MlpParams (shares storage)."""
        return MlpParams([w[k] for w in self.weights],
                         [b[k] for b in self.biases],
                         self.activation, self.head)

    def copy(self) -> "EnsembleParams":
        return EnsembleParams([w.copy() for w in self.weights],
                              [b.copy() for b in self.biases],
                              self.activation, self.head)


def init_ensemble(size: int, sizes, activation: str = "tanh",
                  head: str = "gaussian", rng: np.random.Generator | None = None,
                  zero_final: bool = True) -> EnsembleParams:
    """Members share architecture but draw independent initializations."""
    if rng is None:
        rng = np.random.default_rng(0)
    members = [init_mlp(sizes, activation, head, rng, zero_final=zero_final)
               for _ in range(size)]
    weights = [np.stack([m.weights[i] for m in members])
               for i in range(len(sizes) - 1)]
    biases = [np.stack([m.biases[i] for m in members])
              for i in range(len(sizes) - 1)]
    return EnsembleParams(weights, biases, activation, head)


@dataclass
class NormalizationStats:
    input_mean: np.ndarray   # over concatenated (s, a)
    input_std: np.ndarray
    delta_std: np.ndarray    # over (s' - s); applied scale-only
    delta_mean: np.ndarray   # recorded for diagnostics, not applied


def normalization_stats(states: np.ndarray, actions: np.ndarray,
                        next_states: np.ndarray) -> NormalizationStats:
    inputs = np.concatenate([states, actions], axis=1)
    deltas = next_states - states
    return NormalizationStats(
        input_mean=inputs.mean(axis=0),
        input_std=np.maximum(inputs.std(axis=0), STD_FLOOR),
        delta_std=np.maximum(deltas.std(axis=0), STD_FLOOR),
        delta_mean=deltas.mean(axis=0),
    )


def identity_stats(state_dim: int, action_dim: int) -> NormalizationStats:
    d = state_dim + action_dim
    return NormalizationStats(np.zeros(d), np.ones(d), np.ones(state_dim),
                              np.zeros(state_dim))


@dataclass
class TransitionModel:
    ensemble: EnsembleParams
    stats: NormalizationStats
    state_dim: int
    action_dim: int

    @property
    def size(self) -> int:
        return self.ensemble.size

    def parameters(self) -> list:
        return self.ensemble.arrays()

    def copy(self) -> "TransitionModel":
        return TransitionModel(self.ensemble.copy(), self.stats,
                               self.state_dim, self.action_dim)


@dataclass
class RewardModel:
    net: MlpParams
    state_dim: int

    def parameters(self) -> list:
        return self.net.arrays()

    def copy(self) -> "RewardModel":
        return RewardModel(self.net.copy(), self.state_dim)


def make_transition_model(state_dim: int, action_dim: int, *,
                          ensemble_size: int = 7, layers: int = 7,
                          hidden: int = 32, activation: str = "tanh",
                          stats: NormalizationStats | None = None,
                          rng: np.random.Generator | None = None) -> TransitionModel:
    sizes = [state_dim + action_dim] + [hidden] * (layers - 1) + [2 * state_dim]
    ens = init_ensemble(ensemble_size, sizes, activation, "gaussian", rng,
                        zero_final=True)
    if stats is None:
        stats = identity_stats(state_dim, action_dim)
    return TransitionModel(ens, stats, state_dim, action_dim)


def make_reward_model(state_dim: int, *, layers: int = 4, hidden: int = 32,
                      activation: str = "tanh",
                      rng: np.random.Generator | None = None) -> RewardModel:
    sizes = [2 * state_dim] + [hidden] * (layers - 1) + [1]
    net = init_mlp(sizes, activation, "tanh", rng, zero_final=True)
    return RewardModel(net, state_dim)


# ---------------------------------------------------------------------------
# reward forward
# ---------------------------------------------------------------------------

def reward_forward(model: RewardModel, s, s2, tape: Tape | None = None, *,
                   watch: bool = True):
    """r(s, s') in (-1, 1); differentiable in the parameters and in s'.

    Accepts single vectors or batches; returns a Var of shape (B,) or ().
    """
    joint = tp.concat([s if isinstance(s, Var) else tp.constant(s),
                       s2 if isinstance(s2, Var) else tp.constant(s2)], axis=-1)
    out = mlp_forward(model.net, joint, tape, watch=watch)
    if out.value.ndim == 2:
        out = tp.reshape(out, (-1,))
    return out


def reward_eval(model: RewardModel, s: np.ndarray, s2: np.ndarray) -> np.ndarray:
    joint = np.concatenate([np.atleast_2d(s), np.atleast_2d(s2)], axis=1)
    return mlp_eval(model.net, joint)[:, 0]


# ---------------------------------------------------------------------------
# transition forward / sampling
# ---------------------------------------------------------------------------

def _normalize_inputs(model: TransitionModel, s: np.ndarray,
                      a: np.ndarray) -> np.ndarray:
    x = np.concatenate([np.atleast_2d(s), np.atleast_2d(a)], axis=1)
    return (x - model.stats.input_mean) / model.stats.input_std


def member_dist_eval(model: TransitionModel, member_index: int, s: np.ndarray,
                     a: np.ndarray) -> tuple:
    """Normalized-space (mean, log_std) of one member, numpy path."""
    if not 0 <= member_index < model.size:
        raise ConfigurationError(f"member index {member_index} out of range")
    x = _normalize_inputs(model, s, a)
    out = mlp_eval(model.ensemble.member(member_index), x)
    d = model.state_dim
    return out[:, :d], out[:, d:]


def all_members_eval(model: TransitionModel, s: np.ndarray,
                     a: np.ndarray) -> tuple:
    """Normalized-space (mean, log_std), each (K, B, d), numpy path."""
    x = _normalize_inputs(model, s, a)
    k = model.size
    h = np.broadcast_to(x, (k,) + x.shape)
    ens = model.ensemble
    n = len(ens.weights)
    act = np.tanh if ens.activation == "tanh" else lambda v: np.maximum(v, 0.0)
    for i, (w, b) in enumerate(zip(ens.weights, ens.biases)):
        h = h @ w.transpose(0, 2, 1) + b[:, None, :]
        if i < n - 1:
            h = act(h)
    d = model.state_dim
    mean, raw = h[..., :d], h[..., d:]
    log_std = LOG_STD_MIN + 0.5 * (LOG_STD_MAX - LOG_STD_MIN) * (np.tanh(raw) + 1.0)
    return mean, log_std


def all_members_forward(model: TransitionModel, s: np.ndarray, a: np.ndarray,
                        tape: Tape, *, watch: bool = True) -> tuple:
    """Tracked version of all_members_eval -> (mean Var, log_std Var)."""
    x = _normalize_inputs(model, s, a)
    k = model.size
    h = tp.constant(np.broadcast_to(x, (k,) + x.shape).copy())
    ens = model.ensemble
    act = tp.tanh if ens.activation == "tanh" else tp.relu
    n = len(ens.weights)
    for i, (w, b) in enumerate(zip(ens.weights, ens.biases)):
        if watch:
            wv, bv = tape.watch(w), tape.watch(b)
        else:
            wv, bv = tp.constant(w), tp.constant(b)
        h = tp.ens_affine(h, wv, bv)
        if i < n - 1:
            h = act(h)
    d = model.state_dim
    mean = tp.slice_last(h, 0, d)
    raw = tp.slice_last(h, d, 2 * d)
    half_span = 0.5 * (LOG_STD_MAX - LOG_STD_MIN)
    log_std = tp.add(tp.mul(tp.add(tp.tanh(raw), 1.0), half_span), LOG_STD_MIN)
    return mean, log_std


def transition_sample(model: TransitionModel, member_index: int, s, a, noise,
                      tape: Tape | None = None, *, watch: bool = True):
    """s' = s + delta_std * (mean + exp(log_std) * noise), reparameterized.

    With a tape, gradients flow into the member parameters; the numpy values
    are identical either way. Accepts single vectors or batches.
    """
    s_arr = np.atleast_2d(np.asarray(s, dtype=np.float64))
    a_arr = np.atleast_2d(np.asarray(a, dtype=np.float64))
    noise_arr = np.atleast_2d(np.asarray(noise, dtype=np.float64))
    single = np.asarray(s).ndim == 1
    if tape is None:
        mean, log_std = member_dist_eval(model, member_index, s_arr, a_arr)
        delta = model.stats.delta_std * (mean + np.exp(log_std) * noise_arr)
        out = s_arr + delta
        return out[0] if single else out
    x = _normalize_inputs(model, s_arr, a_arr)
    member = model.ensemble.member(member_index)
    raw_out = mlp_forward(member, x, tape, watch=watch)
    d = model.state_dim
    mean = tp.slice_last(raw_out, 0, d)
    log_std = tp.slice_last(raw_out, d, 2 * d)
    delta = tp.mul(tp.add(mean, tp.mul(tp.exp(log_std), tp.constant(noise_arr))),
                   tp.constant(model.stats.delta_std))
    out = tp.add(tp.constant(s_arr), delta)
    if single:
        out = tp.reshape(out, (-1,))
    return out


def sample_next_states(model: TransitionModel, member_idx: np.ndarray,
                       s: np.ndarray, a: np.ndarray,
                       noise: np.ndarray) -> np.ndarray:
    """Batch sampling with a per-row member assignment (numpy path).

    Rows are grouped by member so each member only sees its own sub-batch.
    """
    x = _normalize_inputs(model, s, a)
    d = model.state_dim
    out = np.empty_like(np.atleast_2d(s))
    for k in np.unique(member_idx):
        rows = member_idx == k
        h = mlp_eval(model.ensemble.member(int(k)), x[rows])
        mean, log_std = h[:, :d], h[:, d:]
        out[rows] = s[rows] + model.stats.delta_std * (
            mean + np.exp(log_std) * noise[rows])
    return out


def predicted_std(model: TransitionModel, s: np.ndarray,
                  a: np.ndarray) -> np.ndarray:
    """Denormalized per-dim predicted std, averaged over members and batch."""
    _, log_std = all_members_eval(model, s, a)
    return (np.exp(log_std) * model.stats.delta_std).mean(axis=(0, 1))
