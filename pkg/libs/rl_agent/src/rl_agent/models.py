from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """DDPG training settings; ``lambda`` is accepted as the JSON key for reward_lambda."""

    model_config = ConfigDict(populate_by_name=True)

    seed: int = Field(0, description="Seeds network init, shuffling, noise and replay sampling")
    reward_lambda: float = Field(2.0, gt=1.0, alias="lambda", description="Reward normaliser factor")
    gamma: float = Field(0.95, ge=0.0, le=1.0, description="Discount factor")
    tau: float = Field(0.005, gt=0.0, le=1.0, description="Soft target update rate")
    actor_lr: float = Field(1e-4, gt=0.0)
    critic_lr: float = Field(1e-3, gt=0.0)
    hidden_width: int = Field(64, ge=1, description="Width of both hidden layers (512 at full scale)")
    total_steps: int = Field(50_000, ge=0, description="Environment steps to train for")
    steps_per_task: int = Field(5, ge=1, description="Consecutive presentations of one task")
    task_group_size: int = Field(20, ge=1, description="Tasks drawn per shuffled group")
    buffer_capacity: int = Field(200_000, ge=1)
    batch_size: int = Field(100, ge=1)
    warmup: int = Field(1_000, ge=0, description="Experiences collected before the first update")
    noise_sigma_start: float = Field(0.1, ge=0.0)
    noise_sigma_end: float = Field(0.01, ge=0.0)
    validation_tasks: int = Field(20, ge=0, description="Tail of the training set used for validation")
    log_every: int = Field(1_000, ge=1, description="Steps between metric rows")
    checkpoint_every: int = Field(5_000, ge=1, description="Steps between checkpoints")

    def noise_sigma(self, step: int) -> float:
        """Linearly decaying exploration noise."""

        if self.total_steps <= 1:
            return self.noise_sigma_end
        fraction = min(step / (self.total_steps - 1), 1.0)
        return self.noise_sigma_start + fraction * (self.noise_sigma_end - self.noise_sigma_start)


class RewardTerms(BaseModel):
    l_v: float = Field(0.0, ge=0.0, description="Largest voltage-band deviation (p.u.)")
    l_i: float = Field(0.0, ge=0.0, description="Largest relative line loading excess")
    c_p: float = Field(0.0, ge=0.0, description="Mean curtailed active power (p.u.)")
    s: float = Field(0.0, ge=0.0, description="Normaliser (lambda/k) * total P flexibility")
    reward_lambda: float = 2.0
    converged: bool = True
    violating: bool = False
    reward: float = Field(..., ge=-1.0, le=1.0)


class MetricRow(BaseModel):
    step: int
    mean_reward: float
    resolution_rate: float
    critic_loss: float
    actor_loss: float

    @staticmethod
    def header() -> list[str]:
        return ["step", "mean_reward", "resolution_rate", "critic_loss", "actor_loss"]

    def values(self) -> list[str]:
        return [
            str(self.step),
            f"{self.mean_reward:.10g}",
            f"{self.resolution_rate:.10g}",
            f"{self.critic_loss:.10g}",
            f"{self.actor_loss:.10g}",
        ]
