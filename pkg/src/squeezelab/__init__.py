"""Numerical laboratory for squeezing functions and Kobayashi distance bounds."""

__version__ = "0.1.0"
