"""Dataset persistence.

File layout: line 1 is a single-line JSON header; every following line is one
transition as flat decimals [s..., a..., s2...] (plus the true reward when the
header flags it). Reals use 17 significant digits, so round-trips are
value-exact for float64.
"""

from __future__ import annotations

import json
import os

import numpy as np

from ..errors import FormatError
from .datasets import Dataset

FORMAT_VERSION = 1


def _fmt_row(values) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def write_dataset(ds: Dataset, path: str) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "env": ds.env_id,
        "quality": ds.quality,
        "state_dim": int(ds.state_dim),
        "action_dim": int(ds.action_dim),
        "count": int(ds.n),
        "seed": int(ds.seed),
        "generator_return": float(ds.generator_return),
        "has_true_reward": ds.true_rewards is not None,
    }
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i in range(ds.n):
            row = np.concatenate([ds.states[i], ds.actions[i], ds.next_states[i]])
            if ds.true_rewards is not None:
                row = np.append(row, ds.true_rewards[i])
            fh.write(_fmt_row(row) + "\n")


def read_dataset(path: str) -> Dataset:
    with open(path) as fh:
        first = fh.readline()
        if not first:
            raise FormatError(f"{path}: empty file")
        try:
            header = json.loads(first)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}:1: bad header: {e}") from e
        version = header.get("format_version")
        if version != FORMAT_VERSION:
            raise FormatError(
                f"{path}:1: format_version {version!r} unsupported "
                f"(expected {FORMAT_VERSION})")
        for key in ("env", "quality", "state_dim", "action_dim", "count",
                    "seed", "generator_return", "has_true_reward"):
            if key not in header:
                raise FormatError(f"{path}:1: header missing key {key!r}")
        sd, ad = int(header["state_dim"]), int(header["action_dim"])
        count = int(header["count"])
        has_reward = bool(header["has_true_reward"])
        width = 2 * sd + ad + (1 if has_reward else 0)
        rows = np.empty((count, width))
        i = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if i >= count:
                raise FormatError(
                    f"{path}:{lineno}: more transitions than header count {count}")
            try:
                vals = np.array([float(tok) for tok in line.split()])
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: bad number: {e}") from e
            if vals.size != width:
                raise FormatError(
                    f"{path}:{lineno}: expected {width} values, got {vals.size}")
            rows[i] = vals
            i += 1
        if i != count:
            raise FormatError(
                f"{path}: truncated — header count {count}, found {i} transitions")
    states = rows[:, :sd]
    actions = rows[:, sd:sd + ad]
    next_states = rows[:, sd + ad:2 * sd + ad]
    rewards = rows[:, -1].copy() if has_reward else None
    return Dataset(header["env"], header["quality"], states.copy(),
                   actions.copy(), next_states.copy(), rewards,
                   int(header["seed"]), float(header["generator_return"]))
