"""Time the numpy and Cython kernel backends on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from glasner._kernels import backends


def workloads(rng):
    primes = backends()["numpy"].sieve_primes(2_000_000)
    pts2 = rng.random((300, 2))
    A = rng.integers(0, 10_000, size=(2000, 1), dtype=np.int64)
    D = np.full(2000, 10_007, dtype=np.int64)
    M = np.array([[7919]], dtype=np.int64)
    coeffs = np.array([3, 0, 5, 1], dtype=np.int64)
    circle = rng.random(100_000)
    return {
        "sieve_primes(2e6)": lambda k: k.sieve_primes(2_000_000),
        "poly_residues(1.5e5 primes)": lambda k: k.poly_residues(coeffs, primes, 1_000_003),
        "phase_sum(1.5e5)": lambda k: k.phase_sum(primes % 1_000_003, 1_000_003, 1),
        "circle_radius(1e5)": lambda k: k.circle_radius(circle),
        "grid_max_min_dist(300 pts, G=200)": lambda k: k.grid_max_min_dist(pts2, 200, False),
        "pair_denominators(2000 pts)": lambda k: k.pair_denominators(A, D),
        "image_residues(2000 pts)": lambda k: k.image_residues(M, A, D),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = backends()
    jobs = workloads(np.random.default_rng(0))
    names = sorted(mods)
    print(f"{'kernel':36s}" + "".join(f"{n:>12s}" for n in names) + ("    speedup" if len(names) == 2 else ""))
    for label, job in jobs.items():
        best = {n: min(timeit.repeat(lambda: job(mods[n]), number=1, repeat=args.repeat)) for n in names}
        line = f"{label:36s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"   {best['numpy'] / best['cython']:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
