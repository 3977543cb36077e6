"""Knotoid spectra of open polygonal curves and of knot neighborhoods."""

__version__ = "0.1.0"
