"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs masked convolution and thickened-surface mass with both backends and
prints timings plus the max relative deviation.  Select the numpy-only
path globally with HALFWAVE_NO_NUMBA=1.

Usage: python benchmarks/bench_kernels.py [--n 16] [--m 8] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from halfwave import kernels
from halfwave.grid import SpatialGrid


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_convolution(n, m, repeat):
    sg = SpatialGrid(n, np.pi)
    rng = np.random.default_rng(0)
    shape = (m,) + sg.shape
    us = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    vs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    args = (us, vs, sg.xi_axis, kernels.MASK_NEAR, 2.0, 0.5, 0.0, np.inf)
    results = {}
    for backend in ("numba", "numpy"):
        if backend == "numba" and not kernels.HAVE_NUMBA:
            continue
        kernels.masked_convolution(*args, backend=backend)  # warm up (JIT)
        t, out = _time(lambda b=backend: kernels.masked_convolution(*args, backend=b), repeat)
        results[backend] = (t, out)
        print(f"masked_convolution[{backend}]  N={n} M={m}: {t * 1e3:9.2f} ms")
    if len(results) == 2:
        a, b = results["numba"][1], results["numpy"][1]
        dev = np.abs(a - b).max() / max(np.abs(a).max(), 1e-300)
        print(f"  agreement: max rel deviation {dev:.2e}, "
              f"speedup x{results['numpy'][0] / results['numba'][0]:.1f}")


def bench_band_mass(n, repeat):
    xi = np.array([8.0, 0.0, 0.0])
    lo = np.full(3, -10.0)
    args = dict(tau=12.0, h=0.5, lo=lo, width=20.0, n=n, e1=-0.5, e2=-0.5)
    results = {}
    for backend in ("numba", "numpy"):
        if backend == "numba" and not kernels.HAVE_NUMBA:
            continue
        kernels.band_mass(xi, 1, 1, backend=backend, **args)  # warm up
        t, out = _time(lambda b=backend: kernels.band_mass(xi, 1, 1, backend=b, **args), repeat)
        results[backend] = (t, out)
        print(f"band_mass[{backend}]          n={n}^3: {t * 1e3:9.2f} ms")
    if len(results) == 2:
        a, b = results["numba"][1], results["numpy"][1]
        dev = abs(a - b) / max(abs(a), 1e-300)
        print(f"  agreement: rel deviation {dev:.2e}, "
              f"speedup x{results['numpy'][0] / results['numba'][0]:.1f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=16, help="spatial lattice size")
    ap.add_argument("--m", type=int, default=8, help="time slices for the convolution")
    ap.add_argument("--band-n", type=int, default=192, help="cells per axis for band_mass")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {kernels.active_backend()}")
    bench_convolution(args.n, args.m, args.repeat)
    bench_band_mass(args.band_n, args.repeat)


if __name__ == "__main__":
    main()
