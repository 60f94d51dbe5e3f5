"""Model checkpoints: JSON header line + one flat decimal array per line.

17-significant-digit decimals make round-trips value-exact for float64.
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..errors import FormatError
from ..numerics.mlp import MlpParams
from .models import (EnsembleParams, NormalizationStats, RewardModel,
                     TransitionModel)

FORMAT_VERSION = 1


def _write_arrays(path: str, header: dict, arrays: list) -> None:
    header = dict(header)
    header["format_version"] = FORMAT_VERSION
    header["arrays"] = [list(a.shape) for a in arrays]
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for a in arrays:
            fh.write(" ".join(f"{v:.17g}" for v in a.reshape(-1)) + "\n")


def _read_arrays(path: str) -> tuple:
    with open(path) as fh:
        first = fh.readline()
        if not first:
            raise FormatError(f"{path}: empty file")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}:1: bad header: {e}") from e
        if header.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"{path}:1: unsupported format_version")
        shapes = header.get("arrays")
        if shapes is None:
            raise FormatError(f"{path}:1: header missing array shapes")
        arrays = []
        for lineno, shape in enumerate(shapes, start=2):
            line = fh.readline()
            if not line:
                raise FormatError(f"{path}:{lineno}: truncated file")
            vals = np.array([float(tok) for tok in line.split()])
            expect = int(np.prod(shape))
            if vals.size != expect:
                raise FormatError(
                    f"{path}:{lineno}: expected {expect} values, got {vals.size}")
            arrays.append(vals.reshape(shape))
    return header, arrays


def _stats_to_header(stats: NormalizationStats) -> dict:
    return {
        "input_mean": stats.input_mean.tolist(),
        "input_std": stats.input_std.tolist(),
        "delta_std": stats.delta_std.tolist(),
        "delta_mean": stats.delta_mean.tolist(),
    }


def _stats_from_header(d: dict) -> NormalizationStats:
    return NormalizationStats(np.array(d["input_mean"]), np.array(d["input_std"]),
                              np.array(d["delta_std"]), np.array(d["delta_mean"]))


def save_transition_model(model: TransitionModel, path: str,
                          env_id: str = "", extra: dict | None = None) -> None:
    ens = model.ensemble
    header = {
        "kind": "transition",
        "env": env_id,
        "state_dim": model.state_dim,
        "action_dim": model.action_dim,
        "ensemble_size": ens.size,
        "layer_sizes": [w.shape[2] for w in ens.weights] + [ens.weights[-1].shape[1]],
        "activation": ens.activation,
        "head": ens.head,
        "normalization": _stats_to_header(model.stats),
        "config": extra or {},
    }
    _write_arrays(path, header, ens.arrays())


def load_transition_model(path: str) -> TransitionModel:
    header, arrays = _read_arrays(path)
    if header.get("kind") != "transition":
        raise FormatError(f"{path}: not a transition checkpoint")
    weights = arrays[0::2]
    biases = arrays[1::2]
    ens = EnsembleParams(weights, biases, header["activation"], header["head"])
    return TransitionModel(ens, _stats_from_header(header["normalization"]),
                           int(header["state_dim"]), int(header["action_dim"]))


def save_reward_model(model: RewardModel, path: str, env_id: str = "",
                      extra: dict | None = None) -> None:
    header = {
        "kind": "reward",
        "env": env_id,
        "state_dim": model.state_dim,
        "layer_sizes": [w.shape[1] for w in model.net.weights]
        + [model.net.weights[-1].shape[0]],
        "activation": model.net.activation,
        "head": model.net.head,
        "config": extra or {},
    }
    _write_arrays(path, header, model.net.arrays())


def load_reward_model(path: str) -> RewardModel:
    header, arrays = _read_arrays(path)
    if header.get("kind") != "reward":
        raise FormatError(f"{path}: not a reward checkpoint")
    net = MlpParams(arrays[0::2], arrays[1::2], header["activation"],
                    header["head"])
    return RewardModel(net, int(header["state_dim"]))


def save_mlp(net: MlpParams, path: str, kind: str, header_extra: dict) -> None:
    header = {"kind": kind, "activation": net.activation, "head": net.head}
    header.update(header_extra)
    _write_arrays(path, header, net.arrays())


def load_mlp(path: str, kind: str) -> tuple:
    header, arrays = _read_arrays(path)
    if header.get("kind") != kind:
        raise FormatError(f"{path}: expected a {kind!r} checkpoint, "
                          f"found {header.get('kind')!r}")
    net = MlpParams(arrays[0::2], arrays[1::2], header["activation"],
                    header["head"])
    return net, header
