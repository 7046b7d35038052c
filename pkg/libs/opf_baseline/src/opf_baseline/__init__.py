"""Reduced-space OPF baseline, brute-force oracle and feasibility checks."""

from .brute_force import brute_force_opf
from .errors import BruteForceLimitError
from .feasibility import (
    check_feasibility,
    curtailment_cost,
    evaluate_setpoints,
    injections_for,
    violation_report,
)
from .label import label_opf
from .models import OpfOptions, OpfSolution
from .penalty import solve_opf

__all__ = [
    "BruteForceLimitError",
    "OpfOptions",
    "OpfSolution",
    "brute_force_opf",
    "check_feasibility",
    "curtailment_cost",
    "evaluate_setpoints",
    "injections_for",
    "label_opf",
    "solve_opf",
    "violation_report",
]
