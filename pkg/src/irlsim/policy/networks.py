"""Actor and critic networks for the virtual-environment training stage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..numerics import tape as tp
from ..numerics.gaussian import (DiagonalGaussian, gaussian_log_prob,
                                 tanh_squash_log_prob)
from ..numerics.mlp import (TANH_CLIP, MlpParams, init_mlp, mlp_eval,
                            mlp_forward, split_gaussian_head)
from ..numerics.tape import Tape, Var

ATANH_LIMIT = 1.0 - 1e-9  # keeps atanh of dataset actions finite


@dataclass
class GaussianPolicy:
    """Squashed-Gaussian actor: 4-layer MLP -> (mean, log_std) pre-tanh."""

    net: MlpParams
    action_low: np.ndarray
    action_high: np.ndarray

    @property
    def state_dim(self) -> int:
        return self.net.in_dim

    @property
    def action_dim(self) -> int:
        return self.net.out_dim // 2

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.action_high + self.action_low)

    @property
    def scale(self) -> np.ndarray:
        return 0.5 * (self.action_high - self.action_low)

    def parameters(self) -> list:
        return self.net.arrays()

    def copy(self) -> "GaussianPolicy":
        return GaussianPolicy(self.net.copy(), self.action_low.copy(),
                              self.action_high.copy())

    # numpy fast paths -------------------------------------------------
    def dist_eval(self, obs: np.ndarray) -> tuple:
        out = mlp_eval(self.net, np.atleast_2d(obs))
        d = self.action_dim
        return out[:, :d], out[:, d:]

    def sample(self, obs: np.ndarray, rng: np.random.Generator) -> tuple:
        """Stochastic action(s); returns (actions, pre_tanh)."""
        single = np.asarray(obs).ndim == 1
        mean, log_std = self.dist_eval(obs)
        u = mean + np.exp(log_std) * rng.standard_normal(mean.shape)
        a = self.center + self.scale * np.tanh(np.clip(u, -TANH_CLIP, TANH_CLIP))
        return (a[0], u[0]) if single else (a, u)

    def mean_action(self, obs: np.ndarray) -> np.ndarray:
        single = np.asarray(obs).ndim == 1
        mean, _ = self.dist_eval(obs)
        a = self.center + self.scale * np.tanh(np.clip(mean, -TANH_CLIP, TANH_CLIP))
        return a[0] if single else a

    def act(self, obs: np.ndarray, rng: np.random.Generator | None = None,
            deterministic: bool = False) -> np.ndarray:
        if deterministic or rng is None:
            return self.mean_action(obs)
        return self.sample(obs, rng)[0]

    def log_prob(self, obs: np.ndarray, pre_tanh: np.ndarray) -> np.ndarray:
        """log pi(a | s) at a = squash(pre_tanh), numpy path."""
        from ..numerics.gaussian import tanh_squash_log_prob_np
        mean, log_std = self.dist_eval(obs)
        base = tanh_squash_log_prob_np(mean, log_std, np.atleast_2d(pre_tanh))
        return base - np.log(self.scale).sum()

    def pre_tanh_of(self, actions: np.ndarray) -> np.ndarray:
        """Invert the squash for dataset actions (clipped for finiteness)."""
        z = (np.atleast_2d(actions) - self.center) / self.scale
        return np.arctanh(np.clip(z, -ATANH_LIMIT, ATANH_LIMIT))


def make_gaussian_policy(state_dim: int, action_low, action_high, *,
                         layers: int = 4, hidden: int = 32,
                         activation: str = "tanh",
                         rng: np.random.Generator | None = None) -> GaussianPolicy:
    action_low = np.asarray(action_low, dtype=np.float64)
    action_high = np.asarray(action_high, dtype=np.float64)
    if action_low.shape != action_high.shape or np.any(action_low >= action_high):
        raise ConfigurationError("invalid action bounds")
    action_dim = action_low.shape[0]
    sizes = [state_dim] + [hidden] * (layers - 1) + [2 * action_dim]
    net = init_mlp(sizes, activation, "gaussian", rng)
    return GaussianPolicy(net, action_low, action_high)


def policy_dist(policy: GaussianPolicy, obs, tape: Tape | None = None, *,
                watch: bool = True) -> DiagonalGaussian:
    """Tracked pre-tanh distribution at ``obs``."""
    out = mlp_forward(policy.net, obs, tape, watch=watch)
    mean, log_std = split_gaussian_head(out)
    return DiagonalGaussian(mean, log_std)


def squash_actions(policy: GaussianPolicy, u) -> Var:
    """center + scale * tanh(u) with the strict-bound clip."""
    t = tp.tanh(tp.clip(u, -TANH_CLIP, TANH_CLIP))
    return tp.add(tp.mul(t, tp.constant(policy.scale)),
                  tp.constant(policy.center))


def squashed_log_prob(policy: GaussianPolicy, dist: DiagonalGaussian,
                      pre_tanh) -> Var:
    """Tracked log pi(a|s) including the action-scale volume correction."""
    base = tanh_squash_log_prob(dist, pre_tanh)
    return tp.sub(base, float(np.log(policy.scale).sum()))


@dataclass
class DeterministicPolicy:
    """tanh-head MLP actor for the deterministic backbone."""

    net: MlpParams
    action_low: np.ndarray
    action_high: np.ndarray

    @property
    def state_dim(self) -> int:
        return self.net.in_dim

    @property
    def action_dim(self) -> int:
        return self.net.out_dim

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.action_high + self.action_low)

    @property
    def scale(self) -> np.ndarray:
        return 0.5 * (self.action_high - self.action_low)

    def parameters(self) -> list:
        return self.net.arrays()

    def copy(self) -> "DeterministicPolicy":
        return DeterministicPolicy(self.net.copy(), self.action_low.copy(),
                                   self.action_high.copy())

    def mean_action(self, obs: np.ndarray) -> np.ndarray:
        single = np.asarray(obs).ndim == 1
        out = mlp_eval(self.net, np.atleast_2d(obs))
        a = self.center + self.scale * out
        return a[0] if single else a

    def act(self, obs: np.ndarray, rng: np.random.Generator | None = None,
            deterministic: bool = False, noise_std: float = 0.0) -> np.ndarray:
        a = self.mean_action(obs)
        if not deterministic and rng is not None and noise_std > 0.0:
            a = a + noise_std * self.scale * rng.standard_normal(a.shape)
        return np.clip(a, self.action_low, self.action_high)


def make_deterministic_policy(state_dim: int, action_low, action_high, *,
                              layers: int = 4, hidden: int = 32,
                              activation: str = "tanh",
                              rng: np.random.Generator | None = None
                              ) -> DeterministicPolicy:
    action_low = np.asarray(action_low, dtype=np.float64)
    action_high = np.asarray(action_high, dtype=np.float64)
    action_dim = action_low.shape[0]
    sizes = [state_dim] + [hidden] * (layers - 1) + [action_dim]
    net = init_mlp(sizes, activation, "tanh", rng)
    return DeterministicPolicy(net, action_low, action_high)


def det_actions(policy: DeterministicPolicy, obs, tape: Tape | None = None, *,
                watch: bool = True) -> Var:
    out = mlp_forward(policy.net, obs, tape, watch=watch)
    return tp.add(tp.mul(out, tp.constant(policy.scale)),
                  tp.constant(policy.center))


@dataclass
class CriticPair:
    """Twin Q-networks with Polyak-averaged target copies."""

    q1: MlpParams
    q2: MlpParams
    target1: MlpParams
    target2: MlpParams
    tau: float = 0.005

    def parameters(self) -> list:
        return self.q1.arrays() + self.q2.arrays()

    def copy(self) -> "CriticPair":
        return CriticPair(self.q1.copy(), self.q2.copy(), self.target1.copy(),
                          self.target2.copy(), self.tau)


def make_critic_pair(state_dim: int, action_dim: int, *, layers: int = 4,
                     hidden: int = 32, activation: str = "tanh",
                     tau: float = 0.005,
                     rng: np.random.Generator | None = None) -> CriticPair:
    sizes = [state_dim + action_dim] + [hidden] * (layers - 1) + [1]
    q1 = init_mlp(sizes, activation, "linear", rng)
    q2 = init_mlp(sizes, activation, "linear", rng)
    return CriticPair(q1, q2, q1.copy(), q2.copy(), tau)


def polyak_update(pair: CriticPair, tau: float | None = None) -> None:
    t = pair.tau if tau is None else tau
    for online, target in ((pair.q1, pair.target1), (pair.q2, pair.target2)):
        for po, pt in zip(online.arrays(), target.arrays()):
            pt *= (1.0 - t)
            pt += t * po


def polyak_update_net(online: MlpParams, target: MlpParams, tau: float) -> None:
    for po, pt in zip(online.arrays(), target.arrays()):
        pt *= (1.0 - tau)
        pt += tau * po


def q_value(net: MlpParams, s, a, tape: Tape | None = None, *,
            watch: bool = True) -> Var:
    joint = tp.concat([s if isinstance(s, Var) else tp.constant(s),
                       a if isinstance(a, Var) else tp.constant(a)], axis=-1)
    out = mlp_forward(net, joint, tape, watch=watch)
    return tp.reshape(out, (-1,)) if out.value.ndim == 2 else out


def q_eval(net: MlpParams, s: np.ndarray, a: np.ndarray) -> np.ndarray:
    joint = np.concatenate([np.atleast_2d(s), np.atleast_2d(a)], axis=1)
    return mlp_eval(net, joint)[:, 0]
