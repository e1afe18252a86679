"""Compare the compiled and numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--sizes 4 16 64] [--repeat 20]
"""

import argparse
import time

import numpy as np

from polycusp import builders, kernels
from polycusp.cusp import build_state, make_convex
from polycusp.functional import hessian


def _time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 8, 32, 64])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the numpy fallback")
    print(f"{'grid':>6} {'corners':>8} " + " ".join(f"{b + ' [ms]':>14}" for b in backends) + "   task")
    rng = np.random.default_rng(0)
    for n in args.sizes:
        surface = builders.random_grid(n, 1.0, 1.4, seed=n)
        T = surface.triangulation
        h = rng.uniform(-0.05, 0.05, size=surface.n_vertices)
        a = T.side_lengths()
        g = T.corner_angles()
        rows = {"corner_geometry": [], "two-triangle refresh": [], "state+hessian": []}
        two = slice(0, 2)
        for b in backends:
            kernels.use_backend(b)
            rows["corner_geometry"].append(
                _time(lambda: kernels.corner_geometry(h, T.tri_vertex, a, g), args.repeat)
            )
            rows["two-triangle refresh"].append(
                _time(lambda: kernels.corner_geometry(h, T.tri_vertex[two], a[two], g[two]), args.repeat)
            )
            rows["state+hessian"].append(
                _time(lambda: hessian(make_convex(build_state(surface, h=h))), max(1, args.repeat // 4))
            )
        for task, times in rows.items():
            cells = " ".join(f"{1e3 * t:>14.3f}" for t in times)
            print(f"{n}x{n:<4} {3 * T.n_triangles:>8} {cells}   {task}")
    kernels.use_backend(backends[0])


if __name__ == "__main__":
    main()
