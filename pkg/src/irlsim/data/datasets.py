"""Transition datasets, mixing, and batch sampling.

Datasets are immutable struct-of-arrays. Uniform with-replacement sampling
realizes the empirical occupancy of the generating policy; mixed sampling
draws from the expert set with probability proportional to its size.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError

QUALITY_TAGS = ("expert", "medium", "random")


@dataclass
class Transition:
    s: np.ndarray
    a: np.ndarray
    s2: np.ndarray
    true_reward: float | None = None


@dataclass
class TransitionBatch:
    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    is_expert: np.ndarray | None = None  # set by stratified mixed sampling

    @property
    def size(self) -> int:
        return self.states.shape[0]


@dataclass
class Dataset:
    env_id: str
    quality: str
    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    true_rewards: np.ndarray | None = None
    seed: int = 0
    generator_return: float = 0.0

    def __post_init__(self):
        if self.quality not in QUALITY_TAGS:
            raise ConfigurationError(f"unknown quality tag {self.quality!r}")
        n = self.states.shape[0]
        if n == 0:
            raise ConfigurationError("dataset must contain at least one transition")
        if self.next_states.shape != self.states.shape or self.actions.shape[0] != n:
            raise ConfigurationError("dataset array shapes disagree")
        for arr in (self.states, self.actions, self.next_states):
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError("dataset contains non-finite values")

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def state_dim(self) -> int:
        return self.states.shape[1]

    @property
    def action_dim(self) -> int:
        return self.actions.shape[1]

    def transition_at(self, i: int) -> Transition:
        r = None if self.true_rewards is None else float(self.true_rewards[i])
        return Transition(self.states[i].copy(), self.actions[i].copy(),
                          self.next_states[i].copy(), r)

    def sample_batch(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        idx = rng.integers(0, self.n, size=batch_size)
        return TransitionBatch(self.states[idx], self.actions[idx],
                               self.next_states[idx])

    def state_ranges(self) -> np.ndarray:
        """Per-dimension span of observed states (rollout-explosion guard)."""
        return self.states.max(axis=0) - self.states.min(axis=0)


@dataclass
class MixedDataset:
    expert: Dataset
    diverse: Dataset

    def __post_init__(self):
        if self.expert.env_id != self.diverse.env_id:
            raise ConfigurationError("mixed datasets must share an environment id")

    @property
    def env_id(self) -> str:
        return self.expert.env_id

    @property
    def state_dim(self) -> int:
        return self.expert.state_dim

    @property
    def action_dim(self) -> int:
        return self.expert.action_dim

    @property
    def omega_expert(self) -> float:
        return self.expert.n / (self.expert.n + self.diverse.n)

    @property
    def omega_diverse(self) -> float:
        return self.diverse.n / (self.expert.n + self.diverse.n)

    def sample_batch(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """Mixture-weighted draw: expert with probability omega_expert."""
        from_expert = rng.random(batch_size) < self.omega_expert
        idx_e = rng.integers(0, self.expert.n, size=int(from_expert.sum()))
        idx_d = rng.integers(0, self.diverse.n, size=int((~from_expert).sum()))
        states = np.empty((batch_size, self.state_dim))
        actions = np.empty((batch_size, self.action_dim))
        next_states = np.empty((batch_size, self.state_dim))
        states[from_expert] = self.expert.states[idx_e]
        actions[from_expert] = self.expert.actions[idx_e]
        next_states[from_expert] = self.expert.next_states[idx_e]
        states[~from_expert] = self.diverse.states[idx_d]
        actions[~from_expert] = self.diverse.actions[idx_d]
        next_states[~from_expert] = self.diverse.next_states[idx_d]
        return TransitionBatch(states, actions, next_states, from_expert)

    def sample_stratified(self, batch_size: int,
                          rng: np.random.Generator) -> TransitionBatch:
        """Fixed sub-batches: round(omega_expert * B) expert rows first."""
        n_e = int(round(self.omega_expert * batch_size))
        n_e = min(max(n_e, 1), batch_size - 1)
        n_d = batch_size - n_e
        idx_e = rng.integers(0, self.expert.n, size=n_e)
        idx_d = rng.integers(0, self.diverse.n, size=n_d)
        states = np.concatenate([self.expert.states[idx_e],
                                 self.diverse.states[idx_d]])
        actions = np.concatenate([self.expert.actions[idx_e],
                                  self.diverse.actions[idx_d]])
        next_states = np.concatenate([self.expert.next_states[idx_e],
                                      self.diverse.next_states[idx_d]])
        mask = np.zeros(batch_size, dtype=bool)
        mask[:n_e] = True
        return TransitionBatch(states, actions, next_states, mask)

    def state_ranges(self) -> np.ndarray:
        all_states = np.concatenate([self.expert.states, self.diverse.states])
        return all_states.max(axis=0) - all_states.min(axis=0)


def mix(expert: Dataset, diverse: Dataset) -> MixedDataset:
    """Combine expert and diverse sets; weights are proportional to sizes."""
    if diverse is None or diverse.n == 0:
        raise ConfigurationError(
            "mixing needs a non-empty diverse dataset (use the single-dataset path)")
    return MixedDataset(expert, diverse)


def sample_batch(data, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
    """Uniform-with-replacement batch (mixture-weighted for MixedDataset)."""
    return data.sample_batch(batch_size, rng)


def split_dataset(ds: Dataset, first_n: int) -> tuple:
    """Deterministic split into (first ``first_n`` rows, remainder)."""
    if not 0 < first_n < ds.n:
        raise ConfigurationError(f"split point {first_n} outside (0, {ds.n})")

    def part(sl):
        tr = None if ds.true_rewards is None else ds.true_rewards[sl].copy()
        return Dataset(ds.env_id, ds.quality, ds.states[sl].copy(),
                       ds.actions[sl].copy(), ds.next_states[sl].copy(),
                       tr, ds.seed, ds.generator_return)

    return part(slice(0, first_n)), part(slice(first_n, ds.n))


def dataset_hash(ds: Dataset) -> str:
    """Content hash over arrays and identifying metadata."""
    h = hashlib.sha256()
    h.update(f"{ds.env_id}|{ds.quality}|{ds.n}|{ds.seed}".encode())
    for arr in (ds.states, ds.actions, ds.next_states):
        h.update(np.ascontiguousarray(arr).tobytes())
    if ds.true_rewards is not None:
        h.update(np.ascontiguousarray(ds.true_rewards).tobytes())
    return h.hexdigest()
