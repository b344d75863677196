"""Symbolic-numeric laboratory for logarithmic traces of Toeplitz projectors."""

__version__ = "0.1.0"
