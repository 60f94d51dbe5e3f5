"""Flat dotted-key config files with line-anchored error reporting.

Syntax: one ``key = value`` pair per line, ``#`` comments, blank lines
ignored. Values are JSON literals (numbers, quoted strings, lists, booleans,
null); bare words parse as strings. Dotted keys nest (``stage1.alpha = 0.1``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from ..envs import ENV_IDS
from ..errors import ConfigurationError
from ..policy.training import PolicyTrainConfig
from ..simulator.training import SimTrainConfig


@dataclass
class RunConfig:
    env: str = "pointmass"
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4, 5, 6])
    output_dir: str = "runs"
    expert_path: str | None = None
    diverse_path: str | None = None
    margin_c: float | None = None        # margin as a multiple of R
    probe_iterations: int | None = None  # expert-only run used to measure R
    eval_episodes: int = 20
    stage1: SimTrainConfig = field(default_factory=SimTrainConfig)
    stage2: PolicyTrainConfig = field(default_factory=PolicyTrainConfig)

    def validate(self) -> None:
        if self.env not in ENV_IDS:
            raise ConfigurationError(f"unknown env {self.env!r}")
        if not self.seeds:
            raise ConfigurationError("seed list must be non-empty")
        if self.eval_episodes <= 0:
            raise ConfigurationError("eval_episodes must be positive")
        self.stage1.validate()
        self.stage2.validate()


def parse_kv_text(text: str, source: str = "<config>") -> dict:
    """Parse the flat format into a nested dict; remembers line numbers."""
    tree: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigurationError(f"{source}:{lineno}: empty key")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value  # bare string
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(
                    f"{source}:{lineno}: key {key!r} conflicts with a scalar")
        node[parts[-1]] = parsed
        lines[key] = lineno
    tree["__lines__"] = lines
    return tree


_RUN_KEYS = {"env", "seeds", "output_dir", "expert_path", "diverse_path",
             "margin_c", "probe_iterations", "eval_episodes"}
_KEY_ALIASES = {"stage2.lambda": "stage2.lam"}


def _fill_dataclass(obj, values: dict, prefix: str, lines: dict, source: str):
    known = {f.name for f in fields(obj)}
    for key, val in values.items():
        if key not in known:
            lineno = lines.get(f"{prefix}.{key}", "?")
            raise ConfigurationError(
                f"{source}:{lineno}: unknown key {prefix}.{key}")
        current = getattr(obj, key)
        if isinstance(current, bool):
            setattr(obj, key, bool(val))
        elif isinstance(current, int) and not isinstance(val, bool) \
                and isinstance(val, (int, float)) and float(val).is_integer():
            setattr(obj, key, int(val))
        elif isinstance(current, float) and isinstance(val, (int, float)):
            setattr(obj, key, float(val))
        else:
            setattr(obj, key, val)


def build_run_config(tree: dict, source: str = "<config>") -> RunConfig:
    lines = tree.pop("__lines__", {})
    cfg = RunConfig()
    for key, val in tree.items():
        if key == "stage1":
            if not isinstance(val, dict):
                raise ConfigurationError(f"{source}: stage1 must be a block")
            _fill_dataclass(cfg.stage1, val, "stage1", lines, source)
        elif key == "stage2":
            if not isinstance(val, dict):
                raise ConfigurationError(f"{source}: stage2 must be a block")
            val = {("lam" if k == "lambda" else k): v for k, v in val.items()}
            _fill_dataclass(cfg.stage2, val, "stage2", lines, source)
        elif key in _RUN_KEYS:
            setattr(cfg, key, val)
        else:
            lineno = lines.get(key, "?")
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key}")
    if isinstance(cfg.seeds, (int, float)):
        cfg.seeds = [int(cfg.seeds)]
    cfg.seeds = [int(s) for s in cfg.seeds]
    try:
        cfg.validate()
    except ConfigurationError as e:
        raise ConfigurationError(f"{source}: {e}") from e
    return cfg


def load_run_config(path: str) -> tuple:
    """Returns (RunConfig, raw text) for config-echo reproducibility."""
    with open(path) as fh:
        text = fh.read()
    tree = parse_kv_text(text, source=path)
    return build_run_config(tree, source=path), text
