from __future__ import annotations

import logging
from typing import Any

import networkx as nx

from .models import BusKind, Grid

logger = logging.getLogger(__name__)


class Violation:
    """One violated grid invariant."""

    def __init__(self, subject: str, rule: str, reason: str):
        self.subject = subject
        self.rule = rule
        self.reason = reason

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject": self.subject,
            "rule": self.rule,
            "reason": self.reason,
        }

    def __repr__(self) -> str:
        return f"Violation({self.subject!r}, {self.rule!r}, {self.reason!r})"


def validate(grid: Grid) -> list[Violation]:
    """Check every bus, line and topology invariant of a grid.

    Args:
        grid: Grid to check; it may be structurally broken.

    Returns:
        One Violation per failed rule, empty when the grid is valid.
    """
    violations: list[Violation] = []

    _validate_bases(grid, violations)
    _validate_buses(grid, violations)
    _validate_lines(grid, violations)
    if _graph_buildable(grid):
        _validate_connectivity(grid, violations)

    if violations:
        logger.debug(f"Grid validation found {len(violations)} violation(s)")
    return violations


def _validate_bases(grid: Grid, violations: list[Violation]) -> None:
    if grid.base_mva <= 0:
        violations.append(Violation("grid", "base", "base_mva must be positive"))
    if grid.base_kv <= 0:
        violations.append(Violation("grid", "base", "base_kv must be positive"))


def _validate_buses(grid: Grid, violations: list[Violation]) -> None:
    slack = [bus.id for bus in grid.buses if bus.kind == BusKind.SLACK]
    if not slack:
        violations.append(Violation("grid", "slack_count", "no slack bus"))
    elif len(slack) > 1:
        violations.append(
            Violation("grid", "slack_count", f"multiple slack buses: {slack}")
        )

    for position, bus in enumerate(grid.buses):
        subject = f"bus {bus.id}"
        if bus.id != position:
            violations.append(
                Violation(subject, "dense_ids", f"bus at position {position} has id {bus.id}")
            )
        if not bus.v_min < bus.v_max:
            violations.append(
                Violation(subject, "voltage_band", f"v_min {bus.v_min} >= v_max {bus.v_max}")
            )
        if bus.p_min > bus.p_max:
            violations.append(
                Violation(subject, "p_box", f"p_min {bus.p_min} > p_max {bus.p_max}")
            )
        if bus.q_min > bus.q_max:
            violations.append(
                Violation(subject, "q_box", f"q_min {bus.q_min} > q_max {bus.q_max}")
            )
        if bus.controllable and not bus.observable:
            violations.append(
                Violation(
                    subject,
                    "controllable_observable",
                    "controllable bus must also be observable",
                )
            )
        if not bus.controllable and (bus.p_min != bus.p_max or bus.q_min != bus.q_max):
            violations.append(
                Violation(
                    subject,
                    "degenerate_box",
                    "non-controllable bus must have p_min == p_max and q_min == q_max",
                )
            )
        if not bus.cost_coeffs:
            violations.append(Violation(subject, "cost_coeffs", "empty cost polynomial"))
        if bus.load_share < 0:
            violations.append(Violation(subject, "load_share", "load_share must be >= 0"))


def _validate_lines(grid: Grid, violations: list[Violation]) -> None:
    n = grid.n_buses
    for index, line in enumerate(grid.lines):
        subject = f"line {index} ({line.from_bus}-{line.to_bus})"
        if line.r < 0:
            violations.append(Violation(subject, "line_resistance", f"r {line.r} < 0"))
        if line.x == 0:
            violations.append(Violation(subject, "line_reactance", "x must be non-zero"))
        if line.s_max <= 0:
            violations.append(Violation(subject, "line_rating", f"s_max {line.s_max} <= 0"))
        if line.from_bus == line.to_bus:
            violations.append(Violation(subject, "self_loop", "from_bus equals to_bus"))
        for end in (line.from_bus, line.to_bus):
            if not 0 <= end < n:
                violations.append(
                    Violation(subject, "line_endpoint", f"unknown bus {end}")
                )


def _graph_buildable(grid: Grid) -> bool:
    n = grid.n_buses
    slack = [bus.id for bus in grid.buses if bus.kind == BusKind.SLACK]
    if len(slack) != 1 or not 0 <= slack[0] < n:
        return False
    return all(0 <= end < n for line in grid.lines for end in (line.from_bus, line.to_bus))


def _validate_connectivity(grid: Grid, violations: list[Violation]) -> None:
    graph = nx.Graph()
    graph.add_nodes_from(range(grid.n_buses))
    graph.add_edges_from((line.from_bus, line.to_bus) for line in grid.lines)
    reachable = nx.node_connected_component(graph, grid.slack_index)
    for bus_id in sorted(set(graph.nodes) - reachable):
        violations.append(
            Violation(f"bus {bus_id}", "connectivity", "bus is not reachable from the slack bus")
        )
