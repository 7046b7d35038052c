"""Curtailment environment, reward, replay buffer and DDPG training."""

from .ddpg import (
    DdpgAgent,
    UpdateDiagnostics,
    actor_gradient,
    critic_targets,
    ddpg_update,
    load_agent,
    save_agent,
)
from .env import CurtailmentEnv, action_to_setpoints, setpoints_to_action
from .errors import EnvironmentStateError, NonFiniteLossError, ReplayBufferError
from .models import MetricRow, RewardTerms, TrainConfig
from .replay import Batch, Experience, ReplayBuffer
from .reward import compute_reward, normaliser
from .rollout import EpisodeResult, resolution_rate, run_episode
from .train import AGENT_FILE, METRICS_FILE, TIMING_FILE, TrainResult, train, write_metrics

__all__ = [
    "AGENT_FILE",
    "Batch",
    "CurtailmentEnv",
    "DdpgAgent",
    "EnvironmentStateError",
    "EpisodeResult",
    "Experience",
    "METRICS_FILE",
    "MetricRow",
    "NonFiniteLossError",
    "ReplayBuffer",
    "ReplayBufferError",
    "RewardTerms",
    "TIMING_FILE",
    "TrainConfig",
    "TrainResult",
    "UpdateDiagnostics",
    "action_to_setpoints",
    "actor_gradient",
    "compute_reward",
    "critic_targets",
    "ddpg_update",
    "load_agent",
    "normaliser",
    "resolution_rate",
    "run_episode",
    "save_agent",
    "setpoints_to_action",
    "train",
    "write_metrics",
]
