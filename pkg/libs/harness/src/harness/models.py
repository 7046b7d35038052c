from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field


class Series(str, Enum):
    RL = "rl"
    OPF = "opf"


class ScatterMode(str, Enum):
    LOADING_VS_P = "loading_vs_p"
    VMIN_VS_P = "vmin_vs_p"
    LOADING_VS_Q = "loading_vs_q"


CATEGORIES = ("total", "upper_voltage", "lower_voltage", "overload")


class EvalRecord(BaseModel):
    """Outcome of one test task for one decision maker."""

    task_id: int
    source: Series = Field(Series.RL, description="Decision maker that produced the setpoints")
    pre_violation: bool = Field(..., description="Uncurtailed state violates any limit")
    pre_upper_voltage: bool = False
    pre_lower_voltage: bool = False
    pre_overload: bool = False
    resolved: bool = Field(False, description="Violating before, violation-free after")
    resolved_upper_voltage: bool = False
    resolved_lower_voltage: bool = False
    resolved_overload: bool = False
    post_violation: bool = Field(False, description="Final state violates any limit or diverged")
    max_loading: float = Field(0.0, ge=0.0, description="Worst line loading after the action")
    v_min: float = Field(1.0, description="Lowest bus voltage after the action (p.u.)")
    v_max: float = Field(1.0, description="Highest bus voltage after the action (p.u.)")
    relative_p_curtailment: float | None = Field(
        default=None, ge=0.0, le=1.0, description="Curtailed P over total P flexibility"
    )
    relative_q_curtailment: float | None = Field(
        default=None, ge=0.0, le=1.0, description="Q deviation over total Q flexibility"
    )
    flexibility: float = Field(0.0, ge=0.0, description="Total P flexibility of the task (p.u.)")
    acted: bool = Field(False, description="Relative P curtailment above the action threshold")
    inference_time: float = Field(0.0, ge=0.0, description="Decision time in seconds")
    final_reward: float | None = None
    p_set: list[float] = Field(default_factory=list)
    q_set: list[float] = Field(default_factory=list)

    def category_flags(self) -> dict[str, tuple[bool, bool]]:
        """(violated before, resolved) per category."""

        return {
            "total": (self.pre_violation, self.resolved),
            "upper_voltage": (self.pre_upper_voltage, self.resolved_upper_voltage),
            "lower_voltage": (self.pre_lower_voltage, self.resolved_lower_voltage),
            "overload": (self.pre_overload, self.resolved_overload),
        }


class CategorySummary(BaseModel):
    category: str
    count: int = Field(0, ge=0)
    solved: int = Field(0, ge=0)
    solved_pct: float | None = Field(
        default=None, ge=0.0, le=100.0, description="None when the category never occurs"
    )


class TimingSummary(BaseModel):
    train_total_s: float | None = Field(default=None, description="From the training timing file")
    inference_per_task_s: float | None = None
    opf_per_task_s: float | None = None
    opf_state_estimation_per_task_s: float | None = Field(
        default=None, description="Not measured; the OPF here gets the full grid state"
    )
    tasks: int = 0
    repetitions: int = 0


class SummaryTable(BaseModel):
    rl: list[CategorySummary] = Field(default_factory=list)
    opf: list[CategorySummary] | None = None
    detection_rate: float | None = Field(
        default=None, description="Share of violating tasks where the agent curtailed at all"
    )
    mean_relative_p_curtailment: float | None = None
    unnecessary_rl: int = Field(0, description="Tasks curtailed by the agent without a violation")
    unnecessary_opf: int | None = None
    unnecessary_curtailment_ratio: float | None = Field(
        default=None, description="unnecessary_rl / max(unnecessary_opf, 1)"
    )
    timing: TimingSummary = Field(default_factory=TimingSummary)

    def category(self, name: str, source: Series = Series.RL) -> CategorySummary:
        rows = self.rl if source is Series.RL else (self.opf or [])
        for row in rows:
            if row.category == name:
                return row
        raise KeyError(name)
