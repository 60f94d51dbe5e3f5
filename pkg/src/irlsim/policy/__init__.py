"""Stage-2: policy optimization inside the learned virtual environment."""

from .ddpg import DdpgAgent, ddpg_update, make_ddpg_agent
from .imitation import bc_train, expert_nll_term, kl_regularizer
from .networks import (CriticPair, DeterministicPolicy, GaussianPolicy,
                       det_actions, make_critic_pair, make_deterministic_policy,
                       make_gaussian_policy, policy_dist, polyak_update,
                       polyak_update_net, q_eval, q_value, squash_actions,
                       squashed_log_prob)
from .replay import ReplayBuffer
from .rollout import virtual_rollout
from .sac import SacAgent, TemperatureState, make_sac_agent, sac_update
from .training import (ALGORITHMS, PolicyTrainConfig, PolicyTrainLog,
                       train_policy)

__all__ = [
    "DdpgAgent", "ddpg_update", "make_ddpg_agent", "bc_train",
    "expert_nll_term", "kl_regularizer", "CriticPair", "DeterministicPolicy",
    "GaussianPolicy", "det_actions", "make_critic_pair",
    "make_deterministic_policy", "make_gaussian_policy", "policy_dist",
    "polyak_update", "polyak_update_net", "q_eval", "q_value",
    "squash_actions", "squashed_log_prob", "ReplayBuffer", "virtual_rollout",
    "SacAgent", "TemperatureState", "make_sac_agent", "sac_update",
    "ALGORITHMS", "PolicyTrainConfig", "PolicyTrainLog", "train_policy",
]
