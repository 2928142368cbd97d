from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from czkit import generators as gen
from czkit.backend import BACKEND, available
from czkit.kernel import BumpProfile

BACKENDS = available()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    return np.array_equal(np.asarray(a), np.asarray(b))


def _cases(seed: int):
    rng = np.random.default_rng(seed)
    kind = seed % 3
    if kind == 0:
        space = gen.random_points(int(rng.integers(2, 80)), dim=2, seed=seed, weights="random")
    elif kind == 1:
        space = gen.line(int(rng.integers(2, 80)), weights="random", seed=seed)
    else:
        space = gen.ultrametric_dyadic(int(rng.integers(1, 6)), weights="random", seed=seed)
    n = space.n
    vals = np.ascontiguousarray(np.abs(rng.standard_normal((n, 3))) * (rng.random((n, 3)) < 0.7))
    R = float(rng.uniform(0.1, 1.0) * space.diameter) if n > 1 else 1.0
    H = BumpProfile()(space.dist / (R / 3))
    u = np.ascontiguousarray(H / H.sum(axis=1, keepdims=True))
    K = np.ascontiguousarray(rng.standard_normal((n, n)))
    E = np.flatnonzero(space.dist[0] < R / 2).astype(np.int64)
    halo = np.flatnonzero(space.dist[E].min(axis=0) < R / 2).astype(np.int64)
    bad = space.dist.copy()
    if n > 2:
        bad[0, n - 1] = bad[n - 1, 0] = 10 * space.diameter
    return [
        ("triangle_violation", (space.dist,)),
        ("triangle_violation", (np.ascontiguousarray(bad),)),
        ("doubling_pairs", (space.sorted_dist, space.cum_weight)),
        ("maximal_sweep", (space.order, space.sorted_dist, space.cum_weight, space.weight, vals, R, True)),
        ("maximal_sweep", (space.order, space.sorted_dist, space.cum_weight, space.weight, vals, R, False)),
        ("gram_sequential", (u,)),
        ("hormander_scan", (K, space.dist, space.weight, E, halo, R)),
    ]


@needs_both
@pytest.mark.parametrize("seed", range(15))
def test_bitwise_equal(seed):
    for name, args in _cases(seed):
        a = getattr(BACKENDS["python"], name)(*args)
        b = getattr(BACKENDS["cython"], name)(*args)
        assert _same(a, b), name


def test_gram_is_symmetric():
    u = np.ascontiguousarray(np.random.default_rng(0).random((7, 7)))
    for mod in BACKENDS.values():
        G = mod.gram_sequential(u)
        assert np.array_equal(G, G.T)


def _backend_in_subprocess(choice: str) -> subprocess.CompletedProcess:
    env = dict(os.environ, CZKIT_BACKEND=choice)
    return subprocess.run([sys.executable, "-c", "import czkit; print(czkit.BACKEND)"],
                          env=env, capture_output=True, text=True)


def test_forced_fallback():
    out = _backend_in_subprocess("python")
    assert out.returncode == 0 and out.stdout.strip() == "python"


def test_bad_choice():
    out = _backend_in_subprocess("fortran")
    assert out.returncode != 0 and "CZKIT_BACKEND" in out.stderr


def test_default_prefers_compiled():
    forced = os.environ.get("CZKIT_BACKEND", "auto").lower()
    if forced == "auto":
        assert BACKEND == ("cython" if "cython" in BACKENDS else "python")
    else:
        assert BACKEND == forced
