from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ReplayBufferError


@dataclass(frozen=True)
class Experience:
    observation: np.ndarray
    action: np.ndarray
    reward: float
    next_observation: np.ndarray
    done: bool


@dataclass(frozen=True)
class Batch:
    observations: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_observations: np.ndarray
    dones: np.ndarray
    indices: np.ndarray

    def __len__(self) -> int:
        return int(self.rewards.shape[0])


class ReplayBuffer:
    """Fixed-capacity FIFO ring of experiences with uniform sampling."""

    def __init__(self, observation_dim: int, action_dim: int, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.observations = np.zeros((capacity, observation_dim))
        self.next_observations = np.zeros((capacity, observation_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self.ptr = 0
        self.size = 0
        self.insertions = 0

    def __len__(self) -> int:
        return self.size

    def push(self, experience: Experience) -> ReplayBuffer:
        for name, value, row in (
            ("observation", experience.observation, self.observations[0]),
            ("next_observation", experience.next_observation, self.next_observations[0]),
            ("action", experience.action, self.actions[0]),
        ):
            if np.shape(value) != row.shape:
                raise ReplayBufferError(f"{name} has shape {np.shape(value)}, expected {row.shape}")

        self.observations[self.ptr] = experience.observation
        self.next_observations[self.ptr] = experience.next_observation
        self.actions[self.ptr] = experience.action
        self.rewards[self.ptr] = experience.reward
        self.dones[self.ptr] = float(experience.done)

        self.ptr = (self.ptr + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        self.insertions += 1
        return self

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Uniform sample with replacement over the current contents."""

        if batch_size < 1:
            raise ReplayBufferError(f"batch_size must be >= 1, got {batch_size}")
        if self.size < batch_size:
            raise ReplayBufferError(
                f"buffer holds {self.size} experiences, cannot sample {batch_size}"
            )
        idx = rng.integers(0, self.size, size=batch_size)
        return Batch(
            observations=self.observations[idx],
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            next_observations=self.next_observations[idx],
            dones=self.dones[idx],
            indices=idx,
        )
