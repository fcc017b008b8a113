"""Numerical laboratory for Brody curves, mean energy and mean dimension."""

__version__ = "0.1.0"
