"""Analysis suites: margin sweep, dynamics-variance ablation, reward
generalization."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import os
from dataclasses import dataclass, field

import numpy as np

from .. import envs
from ..data.datasets import dataset_hash, mix
from ..errors import ConfigurationError
from ..policy.training import train_policy
from ..simulator.models import predicted_std, reward_eval
from ..simulator.training import (fit_transition_nll, select_margin,
                                  train_simulator)
from .config import RunConfig
from .evaluate import evaluate
from .pipeline import _load_datasets, _sub_seed

SWEEP_GRID = tuple(round(0.2 * i, 1) for i in range(10))  # 0.0 .. 1.8


# ---------------------------------------------------------------------------
# margin sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    c: float
    margins: list                 # absolute m per seed (c * R_seed)
    per_seed_returns: list
    return_mean: float
    return_std: float


@dataclass
class SweepResult:
    rows: list
    dataset_hashes: dict
    seeds: list


def margin_sweep(config: RunConfig, grid=SWEEP_GRID) -> SweepResult:
    """Rerun both stages per margin multiple with shared datasets and seeds.

    c = 0 disables the margin (diverse data effectively treated as expert);
    every seed's reward magnitude R comes from one shared expert-only probe.
    """
    expert, diverse = _load_datasets(config)
    if diverse is None:
        raise ConfigurationError("margin sweep needs a diverse dataset")
    spec = envs.make_spec(config.env)
    data = mix(expert, diverse)

    r_per_seed = {}
    for seed in config.seeds:
        _, selection = _probe(config, expert, diverse, seed)
        r_per_seed[seed] = selection.max_abs_reward

    rows = []
    for c in grid:
        margins, returns = [], []
        for seed in config.seeds:
            m = float(c) * r_per_seed[seed]
            margins.append(m)
            stage1_cfg = dataclasses.replace(config.stage1, margin=m,
                                             seed=_sub_seed(seed, 1))
            tmodel, rmodel, _ = train_simulator(stage1_cfg, expert, diverse)
            stage2_cfg = dataclasses.replace(config.stage2,
                                             seed=_sub_seed(seed, 2))
            agent, _ = train_policy(stage2_cfg, tmodel, rmodel, data)
            res = evaluate(spec, agent, config.eval_episodes,
                           [_sub_seed(seed, 3)])
            returns.append(res.mean)
        rows.append(SweepRow(float(c), margins, returns,
                             float(np.mean(returns)), float(np.std(returns))))
    hashes = {"expert": dataset_hash(expert), "diverse": dataset_hash(diverse)}
    result = SweepResult(rows, hashes, list(config.seeds))
    _write_sweep_csv(result, config.output_dir)
    return result


def _probe(config: RunConfig, expert, diverse, seed: int):
    probe_cfg = dataclasses.replace(config.stage1, margin=None,
                                    seed=_sub_seed(seed, 11))
    if config.probe_iterations is not None:
        probe_cfg = dataclasses.replace(probe_cfg,
                                        iterations=config.probe_iterations)
    _, probe_reward, _ = train_simulator(probe_cfg, expert)
    return probe_reward, select_margin(probe_reward, expert, diverse,
                                       c=config.margin_c)


def _write_sweep_csv(result: SweepResult, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "margin_sweep.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "return_mean", "return_std"]
                        + [f"seed_{s}" for s in result.seeds])
        for row in result.rows:
            writer.writerow([row.c, f"{row.return_mean:.17g}",
                             f"{row.return_std:.17g}"]
                            + [f"{r:.17g}" for r in row.per_seed_returns])
    return path


# ---------------------------------------------------------------------------
# dynamics-variance ablation
# ---------------------------------------------------------------------------

@dataclass
class AblationResult:
    high_returns: list
    low_returns: list
    high_mean: float
    low_mean: float
    high_predicted_std: float     # mean over dims/members/probe batch
    low_predicted_std: float
    reward_hashes: list           # per-seed hash, identical across both arms
    dataset_hashes: dict
    seeds: list


def _params_hash(params: list) -> str:
    h = hashlib.sha256()
    for p in params:
        h.update(np.ascontiguousarray(p).tobytes())
    return h.hexdigest()


def variance_ablation(config: RunConfig) -> AblationResult:
    """Same frozen reward, two dynamics models: adversarial+entropy vs NLL fit."""
    expert, diverse = _load_datasets(config)
    spec = envs.make_spec(config.env)
    data = mix(expert, diverse) if diverse is not None else expert

    high_rets, low_rets, reward_hashes = [], [], []
    high_stds, low_stds = [], []
    for seed in config.seeds:
        stage1_cfg = dataclasses.replace(config.stage1, seed=_sub_seed(seed, 1))
        if diverse is not None and stage1_cfg.margin is None:
            _, selection = _probe(config, expert, diverse, seed)
            stage1_cfg = dataclasses.replace(stage1_cfg,
                                             margin=selection.margin)
        tmodel_high, rmodel, _ = train_simulator(stage1_cfg, expert, diverse)
        tmodel_low = fit_transition_nll(stage1_cfg, data)
        reward_hashes.append(_params_hash(rmodel.parameters()))

        probe = data.sample_batch(512, np.random.default_rng(_sub_seed(seed, 5)))
        high_stds.append(predicted_std(tmodel_high, probe.states,
                                       probe.actions).mean())
        low_stds.append(predicted_std(tmodel_low, probe.states,
                                      probe.actions).mean())

        for tmodel, sink in ((tmodel_high, high_rets), (tmodel_low, low_rets)):
            stage2_cfg = dataclasses.replace(config.stage2,
                                             seed=_sub_seed(seed, 2))
            agent, _ = train_policy(stage2_cfg, tmodel, rmodel, data)
            res = evaluate(spec, agent, config.eval_episodes,
                           [_sub_seed(seed, 3)])
            sink.append(res.mean)

    hashes = {"expert": dataset_hash(expert)}
    if diverse is not None:
        hashes["diverse"] = dataset_hash(diverse)
    result = AblationResult(high_rets, low_rets, float(np.mean(high_rets)),
                            float(np.mean(low_rets)), float(np.mean(high_stds)),
                            float(np.mean(low_stds)), reward_hashes, hashes,
                            list(config.seeds))
    _write_ablation_csv(result, config.output_dir)
    return result


def _write_ablation_csv(result: AblationResult, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "variance_ablation.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arm", "return_mean", "predicted_std"]
                        + [f"seed_{s}" for s in result.seeds])
        writer.writerow(["high", f"{result.high_mean:.17g}",
                         f"{result.high_predicted_std:.17g}"]
                        + [f"{r:.17g}" for r in result.high_returns])
        writer.writerow(["low", f"{result.low_mean:.17g}",
                         f"{result.low_predicted_std:.17g}"]
                        + [f"{r:.17g}" for r in result.low_returns])
    return path


# ---------------------------------------------------------------------------
# reward generalization
# ---------------------------------------------------------------------------

@dataclass
class GeneralizationResult:
    table: dict                   # {("seen"|"unseen", "expert"|"diverse"): mean r}
    margin: float | None
    margin_ok_seen: bool | None
    margin_ok_unseen: bool | None
    gap_expert: float             # |seen - unseen| per column
    gap_diverse: float
    margin_tolerance: float = 0.05


def reward_generalization_test(reward_model, seen_expert, seen_diverse,
                               unseen_expert, unseen_diverse,
                               margin: float | None = None,
                               tolerance: float = 0.05) -> GeneralizationResult:
    """Mean reward per (split, tier) cell plus margin/generalization checks."""
    table = {}
    for split, ds in (("seen", seen_expert), ("unseen", unseen_expert)):
        table[(split, "expert")] = float(
            reward_eval(reward_model, ds.states, ds.next_states).mean())
    for split, ds in (("seen", seen_diverse), ("unseen", unseen_diverse)):
        table[(split, "diverse")] = float(
            reward_eval(reward_model, ds.states, ds.next_states).mean())
    ok_seen = ok_unseen = None
    if margin is not None:
        ok_seen = table[("seen", "expert")] - table[("seen", "diverse")] \
            >= margin - tolerance
        ok_unseen = table[("unseen", "expert")] - table[("unseen", "diverse")] \
            >= margin - tolerance
    gap_e = abs(table[("seen", "expert")] - table[("unseen", "expert")])
    gap_d = abs(table[("seen", "diverse")] - table[("unseen", "diverse")])
    return GeneralizationResult(table, margin, ok_seen, ok_unseen, gap_e,
                                gap_d, tolerance)
