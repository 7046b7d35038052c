from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

from types_shared import Provenance, SupplyTask


class ProfileConfig(BaseModel):
    """Shape and scale of the generated load/PV time series (p.u.)."""

    n_steps: int = Field(96, description="Quarter-hour steps to generate")
    household_peak: float = Field(0.02, description="Peak household load per unit load_share")
    pv_peak: float = Field(0.05, description="Clear-sky PV peak per PV bus; 0 disables PV")
    noise_level: float = Field(0.1, ge=0.0, description="Load noise sigma and cloud probability")
    power_factor: float = Field(0.95, gt=0.0, le=1.0, description="Inductive load power factor")
    q_capability: float = Field(0.484, ge=0.0, description="Inverter Q range as share of pv_peak")
    start_day: int = Field(172, ge=0, le=364, description="Day of year of the first step")
    violating_only: bool = Field(False, description="Keep only tasks with a labelled violation")


class AugmentConfig(BaseModel):
    bound_noise_sigma: float = Field(
        0.1, ge=0.0, description="Bound noise std relative to the bus's largest bound magnitude"
    )
    truncation: float = Field(2.0, gt=0.0, description="Noise truncated at +-truncation sigma")
    lower_band_target_fraction: float = Field(
        0.2, ge=0.0, lt=1.0, description="Minimum lower-band share among augmented violating tasks"
    )
    multiplier: int = Field(3, description="Augmented variants per original task")


class DatasetDiagnostics(BaseModel):
    non_physical: int = Field(0, ge=0, description="Tasks dropped for a diverged power flow")
    non_physical_tasks: list[int] = Field(default_factory=list)
    violating: int = 0
    upper_voltage: int = 0
    lower_voltage: int = 0
    overload: int = 0
    replicated: int = Field(0, ge=0, description="Lower-band copies added by augmentation")


class Dataset(BaseModel):
    grid_hash: str = Field(..., description="Hash of the grid the tasks belong to")
    provenance: Provenance = Provenance.ORIGINAL
    seed: int = 0
    config: dict[str, Any] = Field(default_factory=dict, description="Generating config")
    tasks: list[SupplyTask] = Field(default_factory=list)
    diagnostics: DatasetDiagnostics = Field(default_factory=DatasetDiagnostics)

    @property
    def labelled(self) -> bool:
        return all(task.labels is not None for task in self.tasks)

    def violating_tasks(self) -> list[SupplyTask]:
        return [t for t in self.tasks if t.labels is not None and t.labels.has_violation]

    def __len__(self) -> int:
        return len(self.tasks)


class DatasetSplit(BaseModel):
    train: Dataset
    test: Dataset
