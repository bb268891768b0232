"""Exact construction and certification of isomonodromic flows and hyper-Kähler metrics."""

__version__ = "0.1.0"
