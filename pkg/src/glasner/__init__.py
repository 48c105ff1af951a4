"""Quantitative Glasner experiments on tori.

Exact torus arithmetic and density certification, integer-valued polynomial
matrix families evaluated at primes, exponential sums over primes, bump
functions, pair-count statistics, and a densification search.
"""

from glasner._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
