from __future__ import annotations


class ScenarioConfigError(ValueError):
    """Raised for profile or augmentation settings that cannot produce a dataset."""
