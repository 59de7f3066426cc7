"""Rebalancing toolkit and benchmark harness for imbalanced mixed-type tables."""

__version__ = "0.1.0"
