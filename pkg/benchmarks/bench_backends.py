#!/usr/bin/env python3
"""Benchmark the compiled quadrature core against the NumPy fallback.

The kernel application (chirp_sum) is the hot loop of every propagation:
an n x n complex quadrature re-evaluated at each output point.  The
Hermite cumulative sums drive the resummation checks.  Run:

    python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from quadosc._core import BACKEND, _fallback

try:
    from quadosc._core import _kernels as compiled
except ImportError:
    compiled = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_chirp(impl, n):
    x = np.linspace(-20.0, 20.0, n)
    dx = x[1] - x[0]
    z = np.exp(-x ** 2 / 2.0) * np.exp(0.3j * x ** 2) * dx
    return _time(lambda: impl.chirp_sum(x, x[0], dx, z.astype(complex), -1.1))


def bench_hermite(impl, n_terms):
    rho = complex(np.exp(-1j * 0.8 - 1e-3))
    return _time(lambda: impl.hermite_weighted_cumsum(0.9, -0.4, rho, n_terms),
                 repeats=10)


def main():
    print(f"active backend: {BACKEND}")
    impls = [("python ", _fallback)]
    if compiled is not None:
        impls.insert(0, ("compiled", compiled))

    print("\nkernel application (chirp_sum), full n x n quadrature")
    print(f"{'n':>6} " + " ".join(f"{name:>12}" for name, _ in impls) + "   speedup")
    for n in (1024, 2048, 4096):
        row = [bench_chirp(impl, n) for _, impl in impls]
        cells = " ".join(f"{1e3 * v:>10.1f}ms" for v in row)
        speedup = f"{row[-1] / row[0]:.1f}x" if len(row) == 2 else "-"
        print(f"{n:>6} {cells}   {speedup}")

    print("\nHermite product cumulative sums")
    print(f"{'terms':>6} " + " ".join(f"{name:>12}" for name, _ in impls) + "   speedup")
    for n_terms in (400, 4000, 40000):
        row = [bench_hermite(impl, n_terms) for _, impl in impls]
        cells = " ".join(f"{1e6 * v:>10.1f}us" for v in row)
        speedup = f"{row[-1] / row[0]:.1f}x" if len(row) == 2 else "-"
        print(f"{n_terms:>6} {cells}   {speedup}")


if __name__ == "__main__":
    main()
