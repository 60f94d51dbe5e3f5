"""Command-line interface.

Subcommands: gen-data, train-sim, select-margin, train-policy, train-bc,
evaluate, run, sweep-margin, ablate-variance, reward-gen-test.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .. import envs
from ..data.behavior import train_behavior_suite
from ..data.collect import collect_dataset
from ..data.datasets import mix, split_dataset
from ..data.io import read_dataset, write_dataset
from ..errors import IrlsimError
from ..policy.checkpoint import load_policy, save_policy
from ..policy.imitation import bc_train
from ..policy.training import train_policy
from ..simulator.checkpoint import (load_reward_model, load_transition_model,
                                    save_reward_model, save_transition_model)
from ..simulator.training import select_margin, train_simulator
from .config import load_run_config
from .evaluate import evaluate
from .experiments import margin_sweep, reward_generalization_test, variance_ablation
from .pipeline import run_pipeline


def _add_common_stage1(p):
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)


def cmd_gen_data(args) -> int:
    spec = envs.make_spec(args.env)
    if args.tier == "random":
        ds = collect_dataset(spec, None, args.n, args.seed, "random")
    else:
        suite = train_behavior_suite(spec, args.behavior_seed,
                                     episodes=args.behavior_episodes)
        policy = suite.expert if args.tier == "expert" else suite.medium
        actor = (lambda obs, rng: policy.act(obs, rng))
        ds = collect_dataset(spec, actor, args.n, args.seed, args.tier)
    write_dataset(ds, args.out)
    print(f"wrote {ds.n} transitions ({ds.quality}) to {args.out}")
    return 0


def cmd_train_sim(args) -> int:
    cfg, _ = load_run_config(args.config)
    stage1 = dataclasses.replace(cfg.stage1, seed=args.seed)
    if args.iterations is not None:
        stage1 = dataclasses.replace(stage1, iterations=args.iterations)
    if args.alpha is not None:
        stage1 = dataclasses.replace(stage1, alpha=args.alpha)
    if args.beta is not None:
        stage1 = dataclasses.replace(stage1, beta=args.beta)
    if args.margin is not None:
        stage1 = dataclasses.replace(stage1, margin=args.margin)
    expert = read_dataset(args.expert)
    diverse = read_dataset(args.diverse) if args.diverse else None
    tmodel, rmodel, log = train_simulator(stage1, expert, diverse)
    save_transition_model(tmodel, args.out_transition, expert.env_id)
    save_reward_model(rmodel, args.out_reward, expert.env_id)
    print(json.dumps(log.summary(), sort_keys=True))
    return 0


def cmd_select_margin(args) -> int:
    rmodel = load_reward_model(args.reward)
    expert = read_dataset(args.expert)
    diverse = read_dataset(args.diverse)
    sel = select_margin(rmodel, expert, diverse, c=args.c)
    print(json.dumps({
        "max_abs_reward": sel.max_abs_reward,
        "margin": sel.margin,
        "c": sel.c,
        "gap": sel.gap,
        "reliable": sel.reliable,
    }, sort_keys=True))
    return 0


def cmd_train_policy(args) -> int:
    cfg, _ = load_run_config(args.config)
    stage2 = dataclasses.replace(cfg.stage2, algorithm=args.algo,
                                 seed=args.seed)
    if args.episodes is not None:
        stage2 = dataclasses.replace(stage2, episodes=args.episodes)
    tmodel = load_transition_model(args.transition)
    rmodel = load_reward_model(args.reward)
    expert = read_dataset(args.expert)
    data = mix(expert, read_dataset(args.diverse)) if args.diverse else expert
    agent, log = train_policy(stage2, tmodel, rmodel, data)
    save_policy(agent.policy, args.out, expert.env_id)
    print(json.dumps(log.summary(), sort_keys=True))
    return 0


def cmd_train_bc(args) -> int:
    data = read_dataset(args.dataset)
    spec = envs.make_spec(data.env_id)
    policy, log = bc_train(data, args.epochs, seed=args.seed,
                           action_low=spec.action_low,
                           action_high=spec.action_high)
    save_policy(policy, args.out, data.env_id)
    print(json.dumps({"final_nll": log.epoch_nll[-1]}, sort_keys=True))
    return 0


def cmd_evaluate(args) -> int:
    policy, env_id = load_policy(args.policy)
    spec = envs.make_spec(args.env or env_id)
    res = evaluate(spec, policy, args.episodes, args.seeds)
    print(json.dumps({"mean": res.mean, "std": res.std,
                      "per_seed": res.per_seed_means}, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    cfg, echo = load_run_config(args.config)
    report = run_pipeline(cfg, echo)
    print(json.dumps({"run_id": report.run_id,
                      "aggregate_mean": report.aggregate_mean,
                      "aggregate_std": report.aggregate_std,
                      "output_dir": cfg.output_dir}, sort_keys=True))
    return 0


def cmd_sweep_margin(args) -> int:
    cfg, _ = load_run_config(args.config)
    grid = tuple(args.grid) if args.grid else None
    result = margin_sweep(cfg, grid) if grid else margin_sweep(cfg)
    for row in result.rows:
        print(f"c={row.c:.1f} return_mean={row.return_mean:.3f} "
              f"return_std={row.return_std:.3f}")
    return 0


def cmd_ablate_variance(args) -> int:
    cfg, _ = load_run_config(args.config)
    result = variance_ablation(cfg)
    print(json.dumps({
        "high_mean": result.high_mean, "low_mean": result.low_mean,
        "high_predicted_std": result.high_predicted_std,
        "low_predicted_std": result.low_predicted_std,
    }, sort_keys=True))
    return 0


def cmd_reward_gen_test(args) -> int:
    rmodel = load_reward_model(args.reward)
    result = reward_generalization_test(
        rmodel, read_dataset(args.seen_expert), read_dataset(args.seen_diverse),
        read_dataset(args.unseen_expert), read_dataset(args.unseen_diverse),
        margin=args.margin)
    table = {f"{split}/{tier}": v for (split, tier), v in result.table.items()}
    print(json.dumps({"table": table, "margin_ok_seen": result.margin_ok_seen,
                      "margin_ok_unseen": result.margin_ok_unseen,
                      "gap_expert": result.gap_expert,
                      "gap_diverse": result.gap_diverse}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irlsim",
        description="Learn a virtual environment from transition datasets and "
                    "train policies inside it.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="collect a dataset tier")
    p.add_argument("--env", required=True, choices=envs.ENV_IDS)
    p.add_argument("--tier", required=True, choices=("expert", "medium", "random"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--behavior-seed", type=int, default=0)
    p.add_argument("--behavior-episodes", type=int, default=None)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train-sim", help="stage-1 joint reward/dynamics training")
    p.add_argument("--config", required=True)
    p.add_argument("--expert", required=True)
    p.add_argument("--diverse", default=None)
    p.add_argument("--out-transition", required=True)
    p.add_argument("--out-reward", required=True)
    _add_common_stage1(p)
    p.set_defaults(func=cmd_train_sim)

    p = sub.add_parser("select-margin", help="pick m from an expert-only reward")
    p.add_argument("--reward", required=True)
    p.add_argument("--expert", required=True)
    p.add_argument("--diverse", required=True)
    p.add_argument("--c", type=float, default=None)
    p.set_defaults(func=cmd_select_margin)

    p = sub.add_parser("train-policy", help="stage-2 policy training")
    p.add_argument("--config", required=True)
    p.add_argument("--transition", required=True)
    p.add_argument("--reward", required=True)
    p.add_argument("--expert", required=True)
    p.add_argument("--diverse", default=None)
    p.add_argument("--algo", choices=("sac", "ddpg"), default="sac")
    p.add_argument("--episodes", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_policy)

    p = sub.add_parser("train-bc", help="behavior-cloning baseline")
    p.add_argument("--dataset", required=True)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_bc)

    p = sub.add_parser("evaluate", help="true-environment evaluation")
    p.add_argument("--policy", required=True)
    p.add_argument("--env", default=None, choices=envs.ENV_IDS)
    p.add_argument("--episodes", type=int, default=20)
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-margin", help="margin sensitivity table")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=float, nargs="+", default=None)
    p.set_defaults(func=cmd_sweep_margin)

    p = sub.add_parser("ablate-variance", help="dynamics-variance ablation")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_ablate_variance)

    p = sub.add_parser("reward-gen-test", help="seen/unseen reward table")
    p.add_argument("--reward", required=True)
    p.add_argument("--seen-expert", required=True)
    p.add_argument("--seen-diverse", required=True)
    p.add_argument("--unseen-expert", required=True)
    p.add_argument("--unseen-diverse", required=True)
    p.add_argument("--margin", type=float, default=None)
    p.set_defaults(func=cmd_reward_gen_test)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IrlsimError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
