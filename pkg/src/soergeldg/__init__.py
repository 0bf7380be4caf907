"""Exact localized Soergel calculus, Rouquier complexes and dg certificates."""

__version__ = "0.1.0"
