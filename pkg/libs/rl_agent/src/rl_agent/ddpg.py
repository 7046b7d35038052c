"""DDPG on neural_core networks.

Actor ``mu(o)`` maps observations to actions in [-1, 1] (tanh output); the
critic ``Q(o, a)`` takes the concatenated observation and action. One
update computes both gradient sets before touching any parameter, so a
non-finite loss leaves the agent unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from neural_core import (
    Checkpoint,
    CheckpointFormatError,
    GradientSet,
    MlpParams,
    OptimizerState,
    adam_step,
    backward,
    forward,
    init_mlp,
    load_checkpoint,
    save_checkpoint,
    soft_update,
)

from .errors import NonFiniteLossError
from .replay import Batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UpdateDiagnostics:
    critic_loss: float
    actor_loss: float
    q_mean: float
    target_mean: float


@dataclass
class DdpgAgent:
    actor: MlpParams
    critic: MlpParams
    actor_target: MlpParams
    critic_target: MlpParams
    actor_opt: OptimizerState
    critic_opt: OptimizerState
    gamma: float = 0.95
    tau: float = 0.005

    @classmethod
    def create(
        cls,
        observation_dim: int,
        action_dim: int,
        hidden_width: int,
        rng: np.random.Generator,
        *,
        actor_lr: float = 1e-4,
        critic_lr: float = 1e-3,
        gamma: float = 0.95,
        tau: float = 0.005,
    ) -> DdpgAgent:
        actor = init_mlp([observation_dim, hidden_width, hidden_width, action_dim], "tanh", rng)
        critic = init_mlp(
            [observation_dim + action_dim, hidden_width, hidden_width, 1], "identity", rng
        )
        return cls(
            actor=actor,
            critic=critic,
            actor_target=actor.copy(),
            critic_target=critic.copy(),
            actor_opt=OptimizerState.for_params(actor, actor_lr),
            critic_opt=OptimizerState.for_params(critic, critic_lr),
            gamma=gamma,
            tau=tau,
        )

    @property
    def observation_dim(self) -> int:
        return self.actor.n_inputs

    @property
    def action_dim(self) -> int:
        return self.actor.n_outputs

    def act(
        self,
        observation: np.ndarray,
        noise_sigma: float = 0.0,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Policy action, plus clipped Gaussian exploration noise when ``noise_sigma > 0``."""

        action, _ = forward(self.actor, observation)
        if noise_sigma > 0.0:
            if rng is None:
                raise ValueError("exploration noise needs an rng")
            action = action + rng.normal(0.0, noise_sigma, size=action.shape)
        return np.clip(action, -1.0, 1.0)

    def q_value(self, observations: np.ndarray, actions: np.ndarray) -> np.ndarray:
        q, _ = forward(self.critic, np.concatenate([observations, actions], axis=-1))
        return q[..., 0]


def actor_gradient(agent: DdpgAgent, observations: np.ndarray) -> tuple[GradientSet, float]:
    """Gradient of the actor loss ``-mean Q(o, mu(o))`` and the mean Q value."""

    batch = np.atleast_2d(observations)
    actions, actor_cache = forward(agent.actor, batch)
    q, critic_cache = forward(agent.critic, np.concatenate([batch, actions], axis=1))
    _, grad_input = backward(agent.critic, critic_cache, np.full_like(q, 1.0 / len(batch)))
    grad_action = grad_input[:, agent.observation_dim :]
    grads, _ = backward(agent.actor, actor_cache, -grad_action)
    return grads, float(np.mean(q))


def critic_targets(agent: DdpgAgent, batch: Batch) -> np.ndarray:
    next_actions, _ = forward(agent.actor_target, batch.next_observations)
    q_next, _ = forward(
        agent.critic_target, np.concatenate([batch.next_observations, next_actions], axis=1)
    )
    return batch.rewards + agent.gamma * (1.0 - batch.dones) * q_next[:, 0]


def ddpg_update(agent: DdpgAgent, batch: Batch) -> UpdateDiagnostics:
    """One critic regression step, one actor ascent step and soft target updates.

    Raises:
        NonFiniteLossError: a loss or gradient is not finite; nothing is updated.
    """
    n = len(batch)
    targets = critic_targets(agent, batch)
    q, cache = forward(agent.critic, np.concatenate([batch.observations, batch.actions], axis=1))
    error = q[:, 0] - targets
    critic_loss = float(np.mean(error**2))
    critic_grads, _ = backward(agent.critic, cache, (2.0 * error / n)[:, None])
    actor_grads, q_mean = actor_gradient(agent, batch.observations)

    diagnostics = UpdateDiagnostics(
        critic_loss=critic_loss,
        actor_loss=-q_mean,
        q_mean=q_mean,
        target_mean=float(np.mean(targets)),
    )
    if not (
        np.isfinite(critic_loss)
        and np.isfinite(q_mean)
        and critic_grads.is_finite()
        and actor_grads.is_finite()
    ):
        logger.error(f"Non-finite DDPG update: {diagnostics}")
        raise NonFiniteLossError("non-finite loss or gradient in DDPG update", vars(diagnostics))

    adam_step(agent.critic, critic_grads, agent.critic_opt)
    adam_step(agent.actor, actor_grads, agent.actor_opt)
    soft_update(agent.critic_target, agent.critic, agent.tau)
    soft_update(agent.actor_target, agent.actor, agent.tau)
    return diagnostics


def save_agent(path: str | Path, agent: DdpgAgent, metadata: dict[str, Any] | None = None) -> Path:
    meta = dict(metadata or {})
    meta["agent"] = {"gamma": agent.gamma, "tau": agent.tau}
    checkpoint = Checkpoint(
        networks={
            "actor": agent.actor,
            "critic": agent.critic,
            "actor_target": agent.actor_target,
            "critic_target": agent.critic_target,
        },
        optimizers={"actor": agent.actor_opt, "critic": agent.critic_opt},
        metadata=meta,
    )
    return save_checkpoint(path, checkpoint)


def load_agent(path: str | Path) -> tuple[DdpgAgent, dict[str, Any]]:
    checkpoint = load_checkpoint(path)
    settings = checkpoint.metadata.get("agent", {})
    try:
        agent = DdpgAgent(
            actor=checkpoint.networks["actor"],
            critic=checkpoint.networks["critic"],
            actor_target=checkpoint.networks["actor_target"],
            critic_target=checkpoint.networks["critic_target"],
            actor_opt=checkpoint.optimizers["actor"],
            critic_opt=checkpoint.optimizers["critic"],
            gamma=settings.get("gamma", 0.95),
            tau=settings.get("tau", 0.005),
        )
    except KeyError as exc:
        raise CheckpointFormatError(f"{path}: not an agent checkpoint, missing {exc}") from exc
    return agent, checkpoint.metadata
