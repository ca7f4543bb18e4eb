"""Exact E_n-homology of functors on planar level trees."""

__version__ = "0.1.0"
