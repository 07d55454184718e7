"""Weakly nonlinear stability of boundary-layer profiles in the vanishing-viscosity limit."""

__version__ = "0.1.0"
