"""Ring replay buffer over (s, a, r, s') tuples."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, NumericalError


class ReplayBuffer:
    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity <= 0:
            raise ConfigurationError("replay capacity must be positive")
        self.capacity = capacity
        self.states = np.empty((capacity, state_dim))
        self.actions = np.empty((capacity, action_dim))
        self.rewards = np.empty(capacity)
        self.next_states = np.empty((capacity, state_dim))
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, s, a, r: float, s2) -> None:
        s = np.asarray(s, dtype=np.float64)
        a = np.asarray(a, dtype=np.float64)
        s2 = np.asarray(s2, dtype=np.float64)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(a))
                and np.isfinite(r) and np.all(np.isfinite(s2))):
            raise NumericalError("refusing to store a non-finite transition")
        i = self._cursor
        self.states[i] = s
        self.actions[i] = a
        self.rewards[i] = r
        self.next_states[i] = s2
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> tuple:
        if self._size == 0:
            raise ConfigurationError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.next_states[idx])
