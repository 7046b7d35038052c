"""Supply-task datasets: profile generation, labelling, augmentation and storage."""

from .augment import augment, augment_task, perturb_box
from .errors import ScenarioConfigError
from .labeling import label_violations, select_violating
from .models import AugmentConfig, Dataset, DatasetDiagnostics, DatasetSplit, ProfileConfig
from .profiles import (
    clear_sky_factor,
    daylight_window,
    diurnal_load_shape,
    generate_profiles,
    step_time,
)
from .storage import read_dataset, split, write_dataset

__all__ = [
    "AugmentConfig",
    "Dataset",
    "DatasetDiagnostics",
    "DatasetSplit",
    "ProfileConfig",
    "ScenarioConfigError",
    "augment",
    "augment_task",
    "clear_sky_factor",
    "daylight_window",
    "diurnal_load_shape",
    "generate_profiles",
    "label_violations",
    "perturb_box",
    "read_dataset",
    "select_violating",
    "split",
    "step_time",
    "write_dataset",
]
