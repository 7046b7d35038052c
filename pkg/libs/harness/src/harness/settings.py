"""Run configuration and environment lookups for the command line."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from pydantic import BaseModel, Field

from opf_baseline import OpfOptions
from rl_agent import TrainConfig
from scenario_gen import AugmentConfig, ProfileConfig

logger = logging.getLogger(__name__)


class RunConfig(BaseModel):
    """All pipeline settings; every section is optional in the JSON file."""

    profiles: ProfileConfig = Field(default_factory=ProfileConfig)
    augment: AugmentConfig = Field(default_factory=AugmentConfig)
    opf: OpfOptions = Field(default_factory=OpfOptions)
    train: TrainConfig = Field(default_factory=TrainConfig)


def load_run_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    logger.info(f"Loading run config from {path}")
    return RunConfig.model_validate(json.loads(path.read_text(encoding="utf-8")))


def curtail_home() -> Path:
    """Default output root."""
    return Path(os.getenv("CURTAIL_HOME", str(Path.home() / "Curtailment")))


def log_level(verbose: bool = False) -> str:
    if verbose:
        return "DEBUG"
    return os.getenv("CURTAIL_LOG_LEVEL", "INFO").upper()


def resolve_out(path: str | Path | None) -> Path:
    """Relative ``--out`` paths live under CURTAIL_HOME."""

    if path is None:
        return curtail_home()
    path = Path(path).expanduser()
    return path if path.is_absolute() else curtail_home() / path
