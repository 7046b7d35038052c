from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class BusKind(str, Enum):
    SLACK = "slack"
    PQ = "pq"


class Bus(BaseModel):
    """A grid node with its operating limits and flexibility box (p.u.)."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(..., description="Dense bus index 0..n-1")
    kind: BusKind = Field(BusKind.PQ, description="slack or pq")
    v_min: float = Field(0.95, description="Lower voltage band (p.u.)")
    v_max: float = Field(1.05, description="Upper voltage band (p.u.)")
    observable: bool = Field(False, description="P, Q and V are measured at this bus")
    controllable: bool = Field(False, description="Setpoints can be curtailed")
    p_min: float = Field(0.0, description="Active-power flexibility lower bound (p.u.)")
    p_max: float = Field(0.0, description="Active-power flexibility upper bound (p.u.)")
    q_min: float = Field(0.0, description="Reactive-power flexibility lower bound (p.u.)")
    q_max: float = Field(0.0, description="Reactive-power flexibility upper bound (p.u.)")
    cost_coeffs: list[float] = Field(
        default_factory=lambda: [0.0, 0.0, 0.0],
        description="Polynomial cost coefficients c_0..c_n of the active setpoint",
    )
    has_pv: bool = Field(False, description="Bus hosts a PV installation")
    load_share: float = Field(1.0, description="Relative household size for profiles")


class Line(BaseModel):
    """Pi-model branch; transformers are lines with equivalent impedance."""

    model_config = ConfigDict(frozen=True)

    from_bus: int
    to_bus: int
    r: float = Field(..., description="Series resistance (p.u.)")
    x: float = Field(..., description="Series reactance (p.u.)")
    b_shunt: float = Field(0.0, description="Total line charging susceptance (p.u.)")
    s_max: float = Field(..., description="Apparent-power rating (p.u.)")


class Grid(BaseModel):
    """Static grid topology.

    Use ``grid_model.validator.validate`` (or ``load_grid``) to check the
    structural invariants; constructing a Grid only checks field types.
    """

    model_config = ConfigDict(frozen=True)

    base_mva: float = Field(1.0, description="System power base (MVA)")
    base_kv: float = Field(0.4, description="Voltage base (kV)")
    buses: list[Bus] = Field(default_factory=list)
    lines: list[Line] = Field(default_factory=list)

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def slack_index(self) -> int:
        for bus in self.buses:
            if bus.kind == BusKind.SLACK:
                return bus.id
        raise ValueError("grid has no slack bus")

    @property
    def controllable_ids(self) -> list[int]:
        return [bus.id for bus in self.buses if bus.controllable]

    @property
    def observable_ids(self) -> list[int]:
        return [bus.id for bus in self.buses if bus.observable]

    def vectors(self) -> GridVectors:
        return GridVectors.from_grid(self)


class GridVectors:
    """Numpy views of the per-bus and per-line limits of a grid."""

    def __init__(
        self,
        v_min: np.ndarray,
        v_max: np.ndarray,
        s_max: np.ndarray,
        from_idx: np.ndarray,
        to_idx: np.ndarray,
        slack: int,
        controllable: np.ndarray,
        observable: np.ndarray,
    ) -> None:
        self.v_min = v_min
        self.v_max = v_max
        self.s_max = s_max
        self.from_idx = from_idx
        self.to_idx = to_idx
        self.slack = slack
        self.controllable = controllable
        self.observable = observable

    @classmethod
    def from_grid(cls, grid: Grid) -> GridVectors:
        return cls(
            v_min=np.array([bus.v_min for bus in grid.buses], dtype=float),
            v_max=np.array([bus.v_max for bus in grid.buses], dtype=float),
            s_max=np.array([line.s_max for line in grid.lines], dtype=float),
            from_idx=np.array([line.from_bus for line in grid.lines], dtype=int),
            to_idx=np.array([line.to_bus for line in grid.lines], dtype=int),
            slack=grid.slack_index,
            controllable=np.array(grid.controllable_ids, dtype=int),
            observable=np.array(grid.observable_ids, dtype=int),
        )
