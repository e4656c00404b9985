"""Exact computations with generalized 1-skeleta: validation, analysis,
blow-ups, cross sections, total lifts and the dictionary with simplicial fans."""

__version__ = "0.1.0"
