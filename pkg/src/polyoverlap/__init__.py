"""Exact solver for the maximum common overlap of convex polygons under translation."""

from .exact_field import EpsNum, E, eps

__all__ = ["EpsNum", "E", "eps"]
