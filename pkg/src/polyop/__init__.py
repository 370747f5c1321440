"""Finite-set polynomial functors, trees, free monads and dendroidal nerves."""

__version__ = "0.1.0"
