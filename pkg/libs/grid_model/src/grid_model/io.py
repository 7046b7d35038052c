from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from pydantic import ValidationError

from .errors import GridParseError, GridValidationError
from .models import Grid
from .validator import validate

logger = logging.getLogger(__name__)


def load_grid(path: str | Path) -> Grid:
    """Read and validate a JSON grid file.

    Raises:
        GridParseError: file missing, not JSON, or fields of the wrong type.
        GridValidationError: the grid breaks a topology or limit invariant.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise GridParseError(f"Grid file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise GridParseError(f"Malformed grid file {path}: {exc}") from exc

    try:
        grid = Grid.model_validate(raw)
    except ValidationError as exc:
        raise GridParseError(f"Invalid grid fields in {path}: {exc}") from exc

    violations = validate(grid)
    if violations:
        raise GridValidationError(violations)

    logger.info(f"Loaded grid {path.name}: {grid.n_buses} buses, {grid.n_lines} lines")
    return grid


def grid_to_json(grid: Grid) -> str:
    return json.dumps(grid.model_dump(mode="json"), indent=2)


def save_grid(grid: Grid, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(grid_to_json(grid) + "\n", encoding="utf-8")
    return path


def grid_hash(grid: Grid) -> str:
    """SHA-256 of the canonical (sorted-key, compact) JSON form of a grid."""

    canonical = json.dumps(grid.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def pu_to_kw(value: float, grid: Grid) -> float:
    return value * grid.base_mva * 1000.0
