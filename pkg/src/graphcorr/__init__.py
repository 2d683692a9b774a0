"""Conditional independence testing for pairs of vertex-matched graphs."""

__version__ = "0.1.0"
