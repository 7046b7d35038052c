from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, Field


class Provenance(str, Enum):
    """Where a supply task came from."""

    ORIGINAL = "original"
    AUGMENTED = "augmented"


class ViolationReport(BaseModel):
    """Voltage-band and loading excesses of one grid state.

    Categories are non-exclusive: a state can violate the upper band and
    overload a line at the same time.
    """

    max_upper_voltage_excess: float = Field(0.0, ge=0.0, description="max(V - V_max, 0) in p.u.")
    max_lower_voltage_excess: float = Field(0.0, ge=0.0, description="max(V_min - V, 0) in p.u.")
    max_loading_excess: float = Field(0.0, ge=0.0, description="max(loading - 1, 0)")
    upper_voltage: bool = Field(False, description="Upper voltage band violated")
    lower_voltage: bool = Field(False, description="Lower voltage band violated")
    overload: bool = Field(False, description="At least one asset overloaded")
    non_physical: bool = Field(False, description="Power flow did not converge")
    has_violation: bool = Field(False, description="Any category violated or non-physical")
    v_min: float = Field(1.0, description="Lowest bus voltage (p.u.)")
    v_max: float = Field(1.0, description="Highest bus voltage (p.u.)")
    max_loading: float = Field(0.0, ge=0.0, description="Worst relative line loading")
    tolerance: float = Field(1e-4, gt=0.0, description="Feasibility tolerance used")

    @classmethod
    def from_excesses(
        cls,
        upper: float,
        lower: float,
        loading: float,
        *,
        v_min: float,
        v_max: float,
        max_loading: float,
        tolerance: float,
    ) -> ViolationReport:
        upper_flag = upper > tolerance
        lower_flag = lower > tolerance
        overload_flag = loading > tolerance
        return cls(
            max_upper_voltage_excess=upper,
            max_lower_voltage_excess=lower,
            max_loading_excess=loading,
            upper_voltage=upper_flag,
            lower_voltage=lower_flag,
            overload=overload_flag,
            has_violation=upper_flag or lower_flag or overload_flag,
            v_min=v_min,
            v_max=v_max,
            max_loading=max_loading,
            tolerance=tolerance,
        )

    @classmethod
    def non_physical_state(cls, tolerance: float) -> ViolationReport:
        """Report for a diverged power flow; always counts as violating."""

        return cls(non_physical=True, has_violation=True, tolerance=tolerance)


class FlexBox(BaseModel):
    """Active/reactive flexibility range of one controllable bus (p.u.)."""

    bus: int = Field(..., ge=0, description="Bus id")
    p_min: float
    p_max: float
    q_min: float
    q_max: float

    @property
    def p_width(self) -> float:
        return abs(self.p_max - self.p_min)

    @property
    def q_width(self) -> float:
        return abs(self.q_max - self.q_min)


class SupplyTask(BaseModel):
    """One quarter-hour operating point of the grid."""

    task_id: int = Field(..., ge=0, description="Unique id within a dataset lineage")
    timestamp: int = Field(..., ge=0, description="Quarter-hour index of the time series")
    p_ref: list[float] = Field(..., description="Uncurtailed active injections per bus (p.u.)")
    q_ref: list[float] = Field(..., description="Uncurtailed reactive injections per bus (p.u.)")
    flex: list[FlexBox] = Field(
        default_factory=list, description="Boxes of the controllable buses, in bus id order"
    )
    labels: ViolationReport | None = Field(default=None, description="Uncurtailed-state report")
    provenance: Provenance = Field(default=Provenance.ORIGINAL)
    source_task: int | None = Field(default=None, description="Original task of an augmented one")

    def p_ref_array(self) -> np.ndarray:
        return np.asarray(self.p_ref, dtype=float)

    def q_ref_array(self) -> np.ndarray:
        return np.asarray(self.q_ref, dtype=float)

    def flex_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (p_min, p_max, q_min, q_max) vectors over the controllable buses."""

        p_min = np.array([box.p_min for box in self.flex], dtype=float)
        p_max = np.array([box.p_max for box in self.flex], dtype=float)
        q_min = np.array([box.q_min for box in self.flex], dtype=float)
        q_max = np.array([box.q_max for box in self.flex], dtype=float)
        return p_min, p_max, q_min, q_max

    def controllable_ids(self) -> list[int]:
        return [box.bus for box in self.flex]

    def uncurtailed_setpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Reference setpoints at the controllable buses."""

        ids = self.controllable_ids()
        return self.p_ref_array()[ids], self.q_ref_array()[ids]
