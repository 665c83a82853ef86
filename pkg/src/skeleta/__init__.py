"""Metric graphs, coverings, Kummer splitting and loop-length reconstruction."""

__version__ = "0.1.0"
