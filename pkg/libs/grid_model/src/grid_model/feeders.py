"""Seeded synthetic low-voltage feeders.

Layout: bus 0 is the slack on the medium-voltage side, line 0-1 is the
transformer equivalent, buses along a main trunk start at bus 1 and the
remaining buses hang off the trunk as short laterals. All values are per
unit on ``base_mva``/``base_kv``.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import GridValidationError
from .models import Bus, BusKind, Grid, Line
from .validator import validate

logger = logging.getLogger(__name__)

TRANSFORMER = {"r": 0.016, "x": 0.063, "s_max": 0.63}
TRUNK_CABLE = {"r_per_seg": 0.05, "x_per_seg": 0.02, "s_max": 0.19}
LATERAL_CABLE = {"r_per_seg": 0.08, "x_per_seg": 0.025, "s_max": 0.1}
Q_CAPABILITY = 0.484
CURTAILMENT_COST = [0.0, -10.0, 1.0]


def synthetic_feeder(
    n_buses: int,
    controllable_fraction: float = 0.07,
    observable_fraction: float | None = None,
    seed: int = 0,
    *,
    pv_share: float = 0.4,
    pv_capacity: float = 0.05,
    trunk_share: float = 0.6,
    base_mva: float = 1.0,
    base_kv: float = 0.4,
) -> Grid:
    """Build a radial feeder with households everywhere and PV on a subset.

    Args:
        n_buses: Total bus count including the slack, at least 2.
        controllable_fraction: Share of non-slack buses with curtailable PV;
            at least one bus is always controllable.
        observable_fraction: Share of non-slack buses that are measured;
            defaults to ``controllable_fraction``. Controllable buses are
            always observable.
        seed: Seed for topology, PV placement and household sizes.
        pv_share: Share of non-slack buses hosting PV.
        pv_capacity: Nameplate active power of one PV installation (p.u.).
        trunk_share: Share of non-slack buses on the main trunk.

    Returns:
        A validated Grid.
    """
    if n_buses < 2:
        raise ValueError("a feeder needs at least 2 buses")
    if not 0.0 <= controllable_fraction <= 1.0:
        raise ValueError("controllable_fraction must be in [0, 1]")
    if observable_fraction is None:
        observable_fraction = controllable_fraction
    if not 0.0 <= observable_fraction <= 1.0:
        raise ValueError("observable_fraction must be in [0, 1]")

    rng = np.random.default_rng(seed)
    n_load = n_buses - 1
    load_ids = np.arange(1, n_buses)

    lines = [Line(from_bus=0, to_bus=1, b_shunt=0.0, **TRANSFORMER)]
    n_trunk = max(1, int(round(trunk_share * n_load)))
    for bus_id in range(2, n_trunk + 1):
        length = float(rng.uniform(0.8, 1.2))
        lines.append(_cable(bus_id - 1, bus_id, TRUNK_CABLE, length))
    for bus_id in range(n_trunk + 1, n_buses):
        parent = int(rng.integers(1, bus_id))
        length = float(rng.uniform(0.5, 1.0))
        lines.append(_cable(parent, bus_id, LATERAL_CABLE, length))

    n_controllable = max(1, math.ceil(controllable_fraction * n_load))
    n_pv = max(n_controllable, int(round(pv_share * n_load)))
    pv_ids = set(int(i) for i in rng.choice(load_ids, size=min(n_pv, n_load), replace=False))
    controllable = set(
        int(i) for i in rng.choice(sorted(pv_ids), size=n_controllable, replace=False)
    )

    n_observable = max(len(controllable), math.ceil(observable_fraction * n_load))
    candidates = [i for i in load_ids if int(i) not in controllable]
    extra = n_observable - len(controllable)
    observable = set(controllable)
    if extra > 0 and candidates:
        observable |= set(
            int(i) for i in rng.choice(candidates, size=min(extra, len(candidates)), replace=False)
        )

    shares = np.round(rng.uniform(0.5, 1.5, size=n_load), 3)
    buses = [Bus(id=0, kind=BusKind.SLACK, load_share=0.0)]
    for bus_id, share in zip(load_ids, shares, strict=True):
        bus_id = int(bus_id)
        is_controllable = bus_id in controllable
        buses.append(
            Bus(
                id=bus_id,
                observable=bus_id in observable,
                controllable=is_controllable,
                p_min=0.0,
                p_max=pv_capacity if is_controllable else 0.0,
                q_min=-Q_CAPABILITY * pv_capacity if is_controllable else 0.0,
                q_max=Q_CAPABILITY * pv_capacity if is_controllable else 0.0,
                cost_coeffs=list(CURTAILMENT_COST) if is_controllable else [0.0, 0.0, 0.0],
                has_pv=bus_id in pv_ids,
                load_share=float(share),
            )
        )

    grid = Grid(base_mva=base_mva, base_kv=base_kv, buses=buses, lines=lines)
    violations = validate(grid)
    if violations:
        raise GridValidationError(violations)
    logger.info(
        f"Synthetic feeder: {n_buses} buses, {len(pv_ids)} PV, "
        f"{len(controllable)} controllable, {len(observable)} observable"
    )
    return grid


def _cable(from_bus: int, to_bus: int, cable: dict[str, float], length: float) -> Line:
    return Line(
        from_bus=from_bus,
        to_bus=to_bus,
        r=round(cable["r_per_seg"] * length, 6),
        x=round(cable["x_per_seg"] * length, 6),
        b_shunt=0.0,
        s_max=cable["s_max"],
    )
