"""Synthetic household load and PV time series on quarter-hour steps.

Load per bus::

    household_peak * load_share * season(day) * diurnal(hour) * lognormal noise

with a double-peak diurnal shape (morning and evening, small midday bump)
and a winter-heavy seasonal factor. PV per PV bus::

    pv_peak * clear_sky(hour, day) * pv_season(day) * cloud

where the clear-sky bell is a half sine between sunrise and sunset and a
cloud factor U(0.3, 0.8) applies with probability ``noise_level``. Every
step draws from its own child of ``SeedSequence(seed)``, so any prefix or
reordering of the steps reproduces the same values.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from grid_model import Grid, grid_hash
from types_shared import FlexBox, Provenance, SupplyTask

from .errors import ScenarioConfigError
from .models import Dataset, ProfileConfig

logger = logging.getLogger(__name__)

STEPS_PER_DAY = 96
DAYS_PER_YEAR = 365
SUMMER_SOLSTICE = 172
LOAD_PEAK_DAY = 15
CLOUD_FACTOR = (0.3, 0.8)


def diurnal_load_shape(hour: float | np.ndarray) -> float | np.ndarray:
    """Relative household demand over the day, peaking at 1.0 around 19:00."""

    return (
        0.3
        + 0.35 * np.exp(-(((hour - 7.5) / 1.5) ** 2))
        + 0.7 * np.exp(-(((hour - 19.0) / 2.0) ** 2))
        + 0.1 * np.exp(-(((hour - 13.0) / 3.0) ** 2))
    )


def seasonal_load_factor(day: int) -> float:
    return 1.0 + 0.2 * math.cos(2.0 * math.pi * (day - LOAD_PEAK_DAY) / DAYS_PER_YEAR)


def daylight_window(day: int) -> tuple[float, float]:
    """(sunrise, sunset) in hours; 16 h of daylight at midsummer, 8 h at midwinter."""

    swing = 2.0 * math.cos(2.0 * math.pi * (day - SUMMER_SOLSTICE) / DAYS_PER_YEAR)
    return 6.0 - swing, 18.0 + swing


def clear_sky_factor(hour: float, day: int) -> float:
    sunrise, sunset = daylight_window(day)
    if not sunrise <= hour <= sunset:
        return 0.0
    return max(0.0, math.sin(math.pi * (hour - sunrise) / (sunset - sunrise)))


def pv_seasonal_factor(day: int) -> float:
    return 0.55 + 0.45 * math.cos(2.0 * math.pi * (day - SUMMER_SOLSTICE) / DAYS_PER_YEAR)


def check_profile_config(config: ProfileConfig) -> None:
    if config.n_steps < 1:
        raise ScenarioConfigError(f"n_steps must be >= 1, got {config.n_steps}")
    if config.household_peak <= 0.0:
        raise ScenarioConfigError(f"household_peak must be positive, got {config.household_peak}")
    if config.pv_peak < 0.0:
        raise ScenarioConfigError(f"pv_peak must not be negative, got {config.pv_peak}")


def step_time(step: int, start_day: int) -> tuple[float, int]:
    """Hour of day and day of year of a quarter-hour step."""

    hour = (step % STEPS_PER_DAY) / 4.0
    day = (start_day + step // STEPS_PER_DAY) % DAYS_PER_YEAR
    return hour, day


def _task_for_step(
    grid: Grid,
    config: ProfileConfig,
    step: int,
    rng: np.random.Generator,
    tan_phi: float,
) -> SupplyTask:
    hour, day = step_time(step, config.start_day)
    cloudy = rng.random() < config.noise_level
    cloud = rng.uniform(*CLOUD_FACTOR)
    sigma = config.noise_level
    noise = rng.lognormal(mean=-0.5 * sigma**2, sigma=sigma, size=grid.n_buses)

    sun = clear_sky_factor(hour, day) * pv_seasonal_factor(day) * (cloud if cloudy else 1.0)
    demand = config.household_peak * seasonal_load_factor(day) * float(diurnal_load_shape(hour))
    q_range = config.q_capability * config.pv_peak

    p_ref = [0.0] * grid.n_buses
    q_ref = [0.0] * grid.n_buses
    flex: list[FlexBox] = []
    for bus in grid.buses:
        if bus.id == grid.slack_index:
            continue
        load = demand * bus.load_share * float(noise[bus.id])
        pv = config.pv_peak * sun if bus.has_pv else 0.0
        p_ref[bus.id] = pv - load
        q_ref[bus.id] = -load * tan_phi
        if bus.controllable:
            flex.append(
                FlexBox(
                    bus=bus.id,
                    p_min=-load,
                    p_max=p_ref[bus.id],
                    q_min=q_ref[bus.id] - q_range,
                    q_max=q_ref[bus.id] + q_range,
                )
            )

    return SupplyTask(task_id=step, timestamp=step, p_ref=p_ref, q_ref=q_ref, flex=flex)


def generate_profiles(grid: Grid, config: ProfileConfig, seed: int = 0) -> Dataset:
    """Build an unlabelled dataset of ``config.n_steps`` supply tasks.

    Controllable buses get a box spanning full PV curtailment (``p_min`` is
    the bare load) up to the uncurtailed injection, and a reactive range of
    ``q_capability * pv_peak`` around ``q_ref``. PV runs at unity power
    factor; loads draw reactive power at ``config.power_factor``.

    Raises:
        ScenarioConfigError: ``n_steps < 1``, non-positive household peak or
            negative PV peak.
    """
    check_profile_config(config)
    tan_phi = math.tan(math.acos(config.power_factor))
    children = np.random.SeedSequence(seed).spawn(config.n_steps)
    tasks = [
        _task_for_step(grid, config, step, np.random.default_rng(child), tan_phi)
        for step, child in enumerate(children)
    ]
    digest = grid_hash(grid)
    logger.info(f"Generated {len(tasks)} supply tasks for grid {digest[:12]} (seed {seed})")
    return Dataset(
        grid_hash=digest,
        provenance=Provenance.ORIGINAL,
        seed=seed,
        config=config.model_dump(mode="json"),
        tasks=tasks,
    )
