"""Policy checkpoints in the shared header+arrays text format."""

from __future__ import annotations

import numpy as np

from ..errors import FormatError
from ..simulator.checkpoint import load_mlp, save_mlp
from .networks import DeterministicPolicy, GaussianPolicy


def save_policy(policy, path: str, env_id: str = "") -> None:
    if isinstance(policy, GaussianPolicy):
        kind = "gaussian_policy"
    elif isinstance(policy, DeterministicPolicy):
        kind = "deterministic_policy"
    else:
        raise FormatError(f"cannot checkpoint {type(policy).__name__}")
    save_mlp(policy.net, path, kind, {
        "env": env_id,
        "state_dim": policy.state_dim,
        "action_dim": policy.action_dim,
        "action_low": policy.action_low.tolist(),
        "action_high": policy.action_high.tolist(),
    })


def load_policy(path: str):
    """Returns (policy, env_id); dispatches on the checkpoint kind."""
    import json
    with open(path) as fh:
        header = json.loads(fh.readline())
    kind = header.get("kind")
    if kind not in ("gaussian_policy", "deterministic_policy"):
        raise FormatError(f"{path}: not a policy checkpoint (kind={kind!r})")
    net, header = load_mlp(path, kind)
    low = np.array(header["action_low"])
    high = np.array(header["action_high"])
    cls = GaussianPolicy if kind == "gaussian_policy" else DeterministicPolicy
    return cls(net, low, high), header.get("env", "")
