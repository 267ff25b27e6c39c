"""Time ear clipping (each kernel backend) against monotone decomposition.

Usage::

    python3 benchmarks/bench_triangulation.py [--sizes 100 1000 10000] [--repeats 3]

Prints best-of-N wall times and the per-doubling growth ratio for each method.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from trigeom import kernels
from trigeom.randpoly import random_simple_polygon
from trigeom.triangulation import triangulate_monotone


def best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 2000, 4000])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=10)
    ap.add_argument("--skip-python", action="store_true", help="skip the pure-Python ear-clip backend")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    polys = [random_simple_polygon(n, rng, "partition") for n in args.sizes]
    methods = {}
    for name in sorted(kernels.BACKENDS):
        if name == "python" and args.skip_python:
            continue
        k = kernels.get(name)
        methods[f"earclip[{name}]"] = lambda p, k=k: k.earclip(p.coords, p.tol.eps)
    methods["monotone"] = triangulate_monotone

    print(f"active backend: {kernels.active.NAME}")
    print(f"{'method':<18}" + "".join(f"{n:>12}" for n in args.sizes) + f"{'growth/2x':>12}")
    for label, fn in methods.items():
        times = [best_time(lambda p=p: fn(p), args.repeats) for p in polys]
        # growth per doubling of n, fitted over the whole size range
        growth = (times[-1] / times[0]) ** (math.log(2) / math.log(args.sizes[-1] / args.sizes[0]))
        print(f"{label:<18}" + "".join(f"{t:>11.4f}s" for t in times) + f"{growth:>12.2f}")


if __name__ == "__main__":
    main()
