"""Exact computation of K_2 for small group algebras over F_2."""

__version__ = "0.1.0"
