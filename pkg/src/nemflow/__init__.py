"""Pseudo-spectral nematic liquid crystal flow on the periodic square."""

__version__ = "0.1.0"
