"""Exact truncated computations with vertex operator algebras and coinvariants."""

__version__ = "0.1.0"
