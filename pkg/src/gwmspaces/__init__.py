"""Exact computations in generalized-weighted-mean difference sequence spaces."""

__version__ = "0.1.0"
