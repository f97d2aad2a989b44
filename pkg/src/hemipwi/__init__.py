"""Simulation and analysis of the bi-rotated hemispherical-shell piecewise isometry."""

__version__ = "0.1.0"
