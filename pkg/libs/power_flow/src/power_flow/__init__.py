"""Newton-Raphson AC power flow."""

from .models import InjectionSet, PowerFlowOptions, PowerFlowSolution, solution_to_dict
from .solver import branch_flows, mismatch, solve_power_flow

__all__ = [
    "InjectionSet",
    "PowerFlowOptions",
    "PowerFlowSolution",
    "branch_flows",
    "mismatch",
    "solution_to_dict",
    "solve_power_flow",
]
