"""Numerical laboratory for structurally stable diffeomorphisms."""

__version__ = "0.1.0"
