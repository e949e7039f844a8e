"""Hierarchical edge-fog-cloud predictive maintenance with self-tuning policies."""

__version__ = "0.1.0"
