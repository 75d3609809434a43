"""Geometric phase induced in an auxiliary qubit by a critical XY chain."""
__version__ = "0.1.0"
