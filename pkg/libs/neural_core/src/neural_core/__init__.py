"""Numpy MLP machinery for the actor and critic networks."""

from .adam import OptimizerState, adam_step
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .errors import CacheMismatchError, CheckpointFormatError, ShapeMismatchError
from .mlp import (
    GradientSet,
    Layer,
    MlpCache,
    MlpParams,
    OutputActivation,
    backward,
    forward,
    init_mlp,
    soft_update,
)

__all__ = [
    "CacheMismatchError",
    "Checkpoint",
    "CheckpointFormatError",
    "GradientSet",
    "Layer",
    "MlpCache",
    "MlpParams",
    "OptimizerState",
    "OutputActivation",
    "ShapeMismatchError",
    "adam_step",
    "backward",
    "forward",
    "init_mlp",
    "load_checkpoint",
    "save_checkpoint",
    "soft_update",
]
