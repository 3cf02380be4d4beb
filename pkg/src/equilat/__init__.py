"""Exact-integer bases of symmetric lattices."""

__version__ = "0.1.0"
