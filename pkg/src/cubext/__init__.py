"""Finite cube complexes of dimension at most 3: curvature and specialness checks,
graphs of spaces, and finite extensions of partial local isometries."""

__version__ = "0.1.0"
