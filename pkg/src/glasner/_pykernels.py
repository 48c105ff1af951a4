"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two must agree: identical integer outputs, and floating outputs equal up
to summation-order rounding.
"""

import numpy as np

#: Largest modulus accepted by the int64 residue kernels (products stay < 2**63).
MAX_MODULUS = 3_037_000_499

_GRID_CHUNK_CELLS = 1 << 21


def sieve_primes(limit):
    """Return all primes <= limit as an int64 array."""
    limit = int(limit)
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, int(limit ** 0.5) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def poly_residues(coeffs, xs, modulus):
    """Evaluate sum(coeffs[i] * x**i) mod modulus for every x (Horner form).

    ``coeffs`` are ascending int64 values; the result lies in [0, modulus).
    """
    modulus = int(modulus)
    c = np.mod(np.asarray(coeffs, dtype=np.int64), modulus)
    x = np.mod(np.asarray(xs, dtype=np.int64), modulus)
    acc = np.zeros(x.shape[0], dtype=np.int64)
    for ci in c[::-1]:
        acc = np.mod(acc * x, modulus)
        acc = np.mod(acc + ci, modulus)
    return acc


def phase_sum(residues, modulus, w):
    """Sum of exp(2*pi*i*(w*r mod modulus)/modulus) over the residues r."""
    modulus = int(modulus)
    r = np.mod(np.asarray(residues, dtype=np.int64), modulus)
    wm = int(w) % modulus
    t = np.mod(r * wm, modulus) / modulus
    ang = 2.0 * np.pi * t
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def circle_radius(coords):
    """Covering radius of a finite subset of the circle R/Z.

    Returns ``(radius, midpoint)`` where midpoint is the centre of the first
    largest gap in sorted order.
    """
    x = np.sort(np.asarray(coords, dtype=np.float64))
    n = x.shape[0]
    gaps = np.empty(n, dtype=np.float64)
    gaps[: n - 1] = x[1:] - x[:-1]
    gaps[n - 1] = x[0] + 1.0 - x[n - 1]
    i = int(np.argmax(gaps))
    mid = x[i] + gaps[i] / 2.0
    if mid >= 1.0:
        mid -= 1.0
    return float(gaps[i] / 2.0), float(mid)


def grid_max_min_dist(points, G, euclidean):
    """Max over the grid {0, 1/G, ..., (G-1)/G}^d of the distance to ``points``.

    Returns ``(value, flat_index)``; ties resolve to the smallest C-order
    flat index.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    k, d = pts.shape
    G = int(G)
    total = G ** d
    axis = np.arange(G, dtype=np.float64) / G
    chunk = max(1, _GRID_CHUNK_CELLS // max(1, k * d))
    best = -1.0
    best_idx = 0
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        idx = np.arange(start, stop, dtype=np.int64)
        grid = np.empty((stop - start, d), dtype=np.float64)
        rem = idx.copy()
        for ax in range(d - 1, -1, -1):
            grid[:, ax] = axis[rem % G]
            rem //= G
        diff = np.abs(grid[:, None, :] - pts[None, :, :])
        diff = np.minimum(diff, 1.0 - diff)
        if euclidean:
            dist = np.sqrt((diff * diff).sum(axis=2))
        else:
            dist = diff.max(axis=2)
        mins = dist.min(axis=1)
        j = int(np.argmax(mins))
        if mins[j] > best:
            best = float(mins[j])
            best_idx = start + j
    return best, best_idx


def pair_denominators(A, D):
    """Minimal denominators of all pairwise differences, pairs (i<j) row-major.

    Point i is A[i] / D[i] coordinatewise.  Requires D < 2**30 so that every
    intermediate product fits in int64.
    """
    A = np.asarray(A, dtype=np.int64)
    D = np.asarray(D, dtype=np.int64)
    k = A.shape[0]
    iu, ju = np.triu_indices(k, 1)
    if iu.size == 0:
        return np.empty(0, dtype=np.int64)
    L = D[iu] * D[ju]
    num = A[iu] * D[ju][:, None] - A[ju] * D[iu][:, None]
    g = np.gcd.reduce(np.concatenate([L[:, None], num], axis=1), axis=1)
    return L // g


def image_residues(M, A, D):
    """Residues (M @ A[k]) mod D[k] for each point k; shape (k, n).

    ``M`` entries are reduced per point first, so any int64 matrix works with
    D < 2**31.
    """
    M = np.asarray(M, dtype=np.int64)
    A = np.asarray(A, dtype=np.int64)
    D = np.asarray(D, dtype=np.int64)
    n, m = M.shape
    k = A.shape[0]
    out = np.zeros((k, n), dtype=np.int64)
    Dc = D[:, None]
    for j in range(m):
        col = np.mod(M[:, j][None, :], Dc)
        out = np.mod(out + np.mod(col * A[:, j][:, None], Dc), Dc)
    return out
