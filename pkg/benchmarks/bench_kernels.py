"""Compare the compiled and numpy winding/distance kernels.

Run with ``python benchmarks/bench_kernels.py``. Times both backends on the
point sets used by the d_flat quadrature and checks that they agree.
"""

import argparse
import time

import numpy as np

from conformal_curves import kernels
from conformal_curves.bounds import GridSpec, d_flat
from conformal_curves.curve import make_circle


def _best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        from conformal_curves import _kernels as compiled
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'points':>8} {'poly':>6} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for n_pts, n_poly in ((10_000, 256), (100_000, 256), (100_000, 1024), (262_144, 512)):
        pts = rng.uniform(-2, 2, size=(n_pts, 2))
        poly = make_circle((0, 0), 1.0, n_poly).points
        wc, dc = compiled.winding_and_distance(pts, poly)
        wp, dp = kernels.python_winding_and_distance(pts, poly)
        assert np.array_equal(wc, wp) and np.allclose(dc, dp, rtol=1e-12, atol=1e-14)
        tc = _best_of(lambda: compiled.winding_and_distance(pts, poly), args.repeats)
        tp = _best_of(lambda: kernels.python_winding_and_distance(pts, poly), args.repeats)
        print(f"{n_pts:>8} {n_poly:>6} {tc:>10.4f} {tp:>10.4f} {tp / tc:>7.1f}x")

    c1, c2 = make_circle((0, 0), 1.0, 256), make_circle((0, 0), 2.0, 256)
    t0 = time.perf_counter()
    d = d_flat(c1, c2, GridSpec(512))
    print(f"d_flat annulus, grid 512 ({kernels.BACKEND}): {d:.6f} in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
