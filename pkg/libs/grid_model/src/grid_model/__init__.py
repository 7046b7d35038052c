"""Grid data model, file format and admittance assembly."""

from .admittance import AdmittanceMatrix, branch_admittances, build_admittance
from .errors import GridParseError, GridValidationError
from .feeders import synthetic_feeder
from .io import grid_hash, grid_to_json, load_grid, pu_to_kw, save_grid
from .models import Bus, BusKind, Grid, GridVectors, Line
from .validator import Violation, validate

__all__ = [
    "AdmittanceMatrix",
    "Bus",
    "BusKind",
    "Grid",
    "GridParseError",
    "GridValidationError",
    "GridVectors",
    "Line",
    "Violation",
    "branch_admittances",
    "build_admittance",
    "grid_hash",
    "grid_to_json",
    "load_grid",
    "pu_to_kw",
    "save_grid",
    "synthetic_feeder",
    "validate",
]
