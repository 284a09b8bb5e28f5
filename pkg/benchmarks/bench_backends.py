#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on realistic problem sizes and prints a table.
Run from the repository root:

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from blockinfer import _kernels_numpy as knp
from blockinfer._rng import gaussian_block, key_from_parts
from blockinfer.enumeration import rgs_matrix

try:
    from blockinfer import _kernels_numba as knb
except ImportError:
    knb = None


def timeit(fn, repeats=5):
    fn()  # warm (JIT compile / cache fill)
    best = np.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_case(n, p, K, H, seed=0):
    values = np.ascontiguousarray(gaussian_block(key_from_parts(seed), n * p).reshape(n, p))
    rp = rgs_matrix(n, K)
    cp = rgs_matrix(p, H)
    u = values / np.linalg.norm(values)
    z = np.ascontiguousarray(gaussian_block(key_from_parts(seed, 1), n * p).reshape(n, p))
    z_sq = float((z * z).sum())
    key = np.uint64(key_from_parts(seed, 2))

    rows = []
    for name, mod in [("numpy", knp)] + ([("numba", knb)] if knb else []):
        rows.append((name, {
            "residue_scan": timeit(lambda m=mod: m.residue_scan(values, rp, cp, K, H)),
            "truncation_scan": timeit(
                lambda m=mod: m.truncation_scan(u, z, z_sq, 1.0, rp, cp, K, H)),
            "sa_residue_min": timeit(
                lambda m=mod: m.sa_residue_min(values, K, H, 0, 10.0, 0.99, 0.0, 1e-6, 0, key)),
        }))
    return rp.shape[0] * cp.shape[0], rows


def main():
    print(f"{'case':<22}{'kernel':<18}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for (n, p, K, H) in [(7, 7, 2, 2), (10, 10, 2, 2), (8, 8, 3, 3)]:
        n_structs, rows = bench_case(n, p, K, H)
        case = f"{n}x{p} K={K} H={H}"
        results = {name: t for name, t in rows}
        for kernel in ("residue_scan", "truncation_scan", "sa_residue_min"):
            t_np = results["numpy"][kernel]
            if "numba" in results:
                t_nb = results["numba"][kernel]
                print(f"{case:<22}{kernel:<18}{t_np * 1e3:>10.2f}ms"
                      f"{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")
            else:
                print(f"{case:<22}{kernel:<18}{t_np * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            case = ""
        print(f"{'':<22}({n_structs} structures per scan)")


if __name__ == "__main__":
    main()
