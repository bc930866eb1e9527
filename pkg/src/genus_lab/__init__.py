"""Genus distributions of graphs via rotation systems."""

__version__ = "0.1.0"
