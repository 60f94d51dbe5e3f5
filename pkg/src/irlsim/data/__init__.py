"""Datasets: collection at quality tiers, persistence, mixing, sampling."""

from .datasets import (Dataset, MixedDataset, Transition, TransitionBatch,
                       dataset_hash, mix, sample_batch, split_dataset)
from .io import read_dataset, write_dataset
from .collect import collect_dataset
from .behavior import (BehaviorSuite, BehaviorTrainingError,
                       random_policy_return, train_behavior_suite,
                       train_sac_on_env)

__all__ = [
    "Dataset", "MixedDataset", "Transition", "TransitionBatch",
    "dataset_hash", "mix", "sample_batch", "split_dataset", "read_dataset",
    "write_dataset", "collect_dataset", "BehaviorSuite",
    "BehaviorTrainingError", "random_policy_return", "train_behavior_suite",
    "train_sac_on_env",
]
