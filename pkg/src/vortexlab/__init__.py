"""Abelian vortex equations: catalogue, closed-form solutions, radial solves and checks."""

__version__ = "0.1.0"
