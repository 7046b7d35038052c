"""Shared pydantic models and type primitives."""

from .models import FlexBox, Provenance, SupplyTask, ViolationReport

__all__ = ["FlexBox", "Provenance", "SupplyTask", "ViolationReport"]
