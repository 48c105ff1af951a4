"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback.  Setting ``GLASNER_PURE=1`` forces the fallback.
"""

import os

from glasner import _pykernels

try:
    if os.environ.get("GLASNER_PURE"):
        raise ImportError("pure backend forced by GLASNER_PURE")
    from glasner import _ckernels as _backend

    BACKEND = "cython"
except ImportError:
    _backend = _pykernels
    BACKEND = "numpy"

MAX_MODULUS = _pykernels.MAX_MODULUS

sieve_primes = _backend.sieve_primes
poly_residues = _backend.poly_residues
phase_sum = _backend.phase_sum
circle_radius = _backend.circle_radius
grid_max_min_dist = _backend.grid_max_min_dist
pair_denominators = _backend.pair_denominators
image_residues = _backend.image_residues


def backends():
    """Return the importable kernel modules keyed by name (for tests/benchmarks)."""
    found = {"numpy": _pykernels}
    try:
        from glasner import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
