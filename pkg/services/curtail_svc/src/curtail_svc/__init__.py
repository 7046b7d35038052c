"""Curtailment decision service package."""
