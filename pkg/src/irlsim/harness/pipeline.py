"""End-to-end per-seed pipeline: datasets -> stage 1 -> stage 2 -> evaluation."""

from __future__ import annotations

import dataclasses
import time
import traceback

import numpy as np

from .. import envs
from ..data.datasets import dataset_hash, mix
from ..data.io import read_dataset
from ..errors import ConfigurationError, IrlsimError
from ..simulator.training import select_margin, train_simulator
from ..policy.training import train_policy
from .config import RunConfig
from .evaluate import evaluate
from .report import (MetricsReport, SeedResult, aggregate_from_results,
                     make_run_id, write_report)


def _sub_seed(master: int, stream: int) -> int:
    return int(np.random.SeedSequence([int(master), stream]).generate_state(1)[0])


def _load_datasets(config: RunConfig):
    if config.expert_path is None:
        raise ConfigurationError("pipeline needs expert_path")
    expert = read_dataset(config.expert_path)
    if expert.env_id != config.env:
        raise ConfigurationError(
            f"expert dataset env {expert.env_id!r} != config env {config.env!r}")
    diverse = None
    if config.diverse_path is not None:
        diverse = read_dataset(config.diverse_path)
        if diverse.env_id != config.env:
            raise ConfigurationError(
                f"diverse dataset env {diverse.env_id!r} != config env "
                f"{config.env!r}")
    return expert, diverse


def measure_margin(config: RunConfig, expert, diverse, seed: int) -> tuple:
    """Expert-only probe run -> reward magnitude R -> margin m = c * R."""
    probe_cfg = dataclasses.replace(config.stage1, margin=None,
                                    seed=_sub_seed(seed, 11))
    if config.probe_iterations is not None:
        probe_cfg = dataclasses.replace(probe_cfg,
                                        iterations=config.probe_iterations)
    _, probe_reward, _ = train_simulator(probe_cfg, expert)
    selection = select_margin(probe_reward, expert, diverse, c=config.margin_c)
    return selection.margin, selection


def run_seed(config: RunConfig, expert, diverse, seed: int) -> SeedResult:
    """One pipeline seed; exceptions are caught by run_pipeline."""
    spec = envs.make_spec(config.env)
    result = SeedResult(seed=seed)
    stage1_cfg = dataclasses.replace(config.stage1, seed=_sub_seed(seed, 1))
    if diverse is not None and stage1_cfg.margin is None:
        m, selection = measure_margin(config, expert, diverse, seed)
        stage1_cfg = dataclasses.replace(stage1_cfg, margin=m)
        result.margin = m
        result.stage1["margin_c"] = selection.c
        result.stage1["max_abs_reward"] = selection.max_abs_reward
        result.stage1["margin_reliable"] = selection.reliable
    elif stage1_cfg.margin is not None:
        result.margin = stage1_cfg.margin

    tmodel, rmodel, sim_log = train_simulator(stage1_cfg, expert, diverse)
    result.stage1.update(sim_log.summary())

    data = mix(expert, diverse) if diverse is not None else expert
    stage2_cfg = dataclasses.replace(config.stage2, seed=_sub_seed(seed, 2))
    agent, pol_log = train_policy(stage2_cfg, tmodel, rmodel, data)
    result.stage2 = pol_log.summary()

    eval_res = evaluate(spec, agent, config.eval_episodes,
                        [_sub_seed(seed, 3)])
    result.return_mean = eval_res.mean
    result.return_std = eval_res.std
    return result


def run_pipeline(config: RunConfig, config_echo: str = "") -> MetricsReport:
    """All seeds; failures are recorded per seed and do not stop the run."""
    started = time.time()
    expert, diverse = _load_datasets(config)
    combo = expert.quality if diverse is None \
        else f"{expert.quality}-{diverse.quality}"
    hashes = {"expert": dataset_hash(expert)}
    if diverse is not None:
        hashes["diverse"] = dataset_hash(diverse)

    results = []
    for seed in config.seeds:
        try:
            results.append(run_seed(config, expert, diverse, seed))
        except IrlsimError as e:
            results.append(SeedResult(seed=seed, status="failed", error=str(e)))
        except Exception as e:  # keep remaining seeds alive
            results.append(SeedResult(
                seed=seed, status="failed",
                error=f"{type(e).__name__}: {e}\n{traceback.format_exc()}"))

    agg_mean, agg_std = aggregate_from_results(results)
    report = MetricsReport(
        run_id=make_run_id(config.env, combo, config.stage2.algorithm,
                           config_echo),
        env=config.env, dataset_combo=combo, algo=config.stage2.algorithm,
        seeds=list(config.seeds), results=results,
        aggregate_mean=agg_mean, aggregate_std=agg_std,
        margin_c=config.margin_c, alpha=config.stage1.alpha,
        lam=config.stage2.lam, dataset_hashes=hashes, config_echo=config_echo,
        timing_seconds=time.time() - started)
    write_report(report, config.output_dir)
    return report
