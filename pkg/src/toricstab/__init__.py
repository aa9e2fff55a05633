"""Exact-arithmetic toolkit for toric intersection theory and slope
stability of equivariant reflexive sheaves."""

__version__ = "0.1.0"
