"""Experiment orchestration: configs, evaluation, pipelines, CLI."""

from .config import RunConfig, build_run_config, load_run_config, parse_kv_text
from .evaluate import EvalResult, evaluate, normalized_score
from .experiments import (AblationResult, GeneralizationResult, SweepResult,
                          margin_sweep, reward_generalization_test,
                          variance_ablation)
from .pipeline import run_pipeline, run_seed
from .report import (MetricsReport, SeedResult, aggregate_from_results,
                     aggregates_from_csv, read_csv_rows, read_report,
                     write_report)

__all__ = [
    "RunConfig", "build_run_config", "load_run_config", "parse_kv_text",
    "EvalResult", "evaluate", "normalized_score", "AblationResult",
    "GeneralizationResult", "SweepResult", "margin_sweep",
    "reward_generalization_test", "variance_ablation", "run_pipeline",
    "run_seed", "MetricsReport", "SeedResult", "aggregate_from_results",
    "aggregates_from_csv", "read_csv_rows", "read_report", "write_report",
]
