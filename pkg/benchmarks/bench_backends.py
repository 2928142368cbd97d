"""Time the compiled kernels against the numpy fallback and confirm identical output.

    python3 benchmarks/bench_backends.py --sizes 100 200 400 --repeat 3
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from czkit.backend import available
from czkit.generators import random_points
from czkit.kernel import BumpProfile


def _cases(n: int, seed: int):
    space = random_points(n, dim=2, seed=seed)
    rng = np.random.default_rng(seed)
    vals = np.ascontiguousarray(np.abs(rng.standard_normal((n, 8))))
    R = float(np.median(space.dist))
    H = BumpProfile()(space.dist / (R / 4))
    u = np.ascontiguousarray(H / H.sum(axis=1, keepdims=True))
    E = np.flatnonzero(space.dist[0] < R / 2).astype(np.int64)
    halo = np.flatnonzero(space.dist[E].min(axis=0) < R / 4).astype(np.int64)
    K = np.ascontiguousarray(u @ u.T)
    return {
        "triangle_violation": (space.dist,),
        "doubling_pairs": (space.sorted_dist, space.cum_weight),
        "maximal_sweep": (space.order, space.sorted_dist, space.cum_weight, space.weight, vals, R, False),
        "gram_sequential": (u,),
        "hormander_scan": (K, space.dist, space.weight, E, halo, R),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    backends = available()
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is available")
    names = list(backends)
    print(f"{'kernel':<20}{'n':>6}" + "".join(f"{b + ' [s]':>14}" for b in names) + f"{'speedup':>10}{'equal':>8}")
    for n in args.sizes:
        for kname, call_args in _cases(n, args.seed).items():
            times, outs = {}, {}
            for b in names:
                fn = getattr(backends[b], kname)
                best = np.inf
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    out = fn(*call_args)
                    best = min(best, time.perf_counter() - t0)
                times[b], outs[b] = best, out
            speed = times["python"] / times["cython"] if "cython" in times and times["cython"] > 0 else float("nan")
            equal = all(_same(outs[names[0]], outs[b]) for b in names[1:])
            print(f"{kname:<20}{n:>6}" + "".join(f"{times[b]:>14.5f}" for b in names)
                  + f"{speed:>10.1f}{str(equal):>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
