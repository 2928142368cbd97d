"""Deterministic constructors for test and demo spaces."""
from __future__ import annotations

from typing import Any

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .backend import kernels
from .space import MetricMeasureSpace, SpaceError, build_space

KINDS = ("line", "grid", "graph_shortest_path", "ultrametric_dyadic", "snowflake", "random_points")


def repair_triangle(dist: np.ndarray, max_passes: int = 5) -> np.ndarray:
    """Shortest-path closure of a nearly metric matrix.

    Euclidean distances of collinear lattice points can miss the triangle
    inequality by one ulp; a Floyd-Warshall pass removes such violations
    without moving any entry by more than rounding error.
    """
    dist = np.array(dist, dtype=np.float64)
    for _ in range(max_passes):
        if kernels.triangle_violation(np.ascontiguousarray(dist)) is None:
            return dist
        for k in range(dist.shape[0]):
            np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :], out=dist)
    if kernels.triangle_violation(np.ascontiguousarray(dist)) is not None:
        raise SpaceError("could not repair triangle inequality")
    return dist


def _weights(n: int, spec, seed) -> np.ndarray:
    if spec is None or spec == "unit":
        return np.ones(n)
    if spec == "random":
        if seed is None:
            raise ValueError("random weights need a seed")
        return np.random.default_rng([seed, 1]).uniform(0.5, 2.0, size=n)
    w = np.asarray(spec, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got {w.shape}")
    return w


def euclidean_distances(coords, p: float = 2.0) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords[:, None]
    if p == np.inf:
        d = cdist(coords, coords, metric="chebyshev")
    elif p == 1:
        d = cdist(coords, coords, metric="cityblock")
    elif p == 2:
        d = cdist(coords, coords, metric="euclidean")
    else:
        if p < 1:
            raise ValueError("p-norm distances need p >= 1")
        d = cdist(coords, coords, metric="minkowski", p=p)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return repair_triangle(d)


def graph_distances(n: int, edges) -> np.ndarray:
    edges = np.asarray(edges, dtype=np.float64).reshape(-1, 3)
    i, j, w = edges[:, 0].astype(int), edges[:, 1].astype(int), edges[:, 2]
    if np.any(w <= 0):
        raise ValueError("edge weights must be positive")
    if edges.size and (i.min() < 0 or j.min() < 0 or max(i.max(), j.max()) >= n):
        raise ValueError("edge endpoint out of range")
    adj = csr_matrix((w, (i, j)), shape=(n, n))
    d = shortest_path(adj, method="D", directed=False)
    if not np.all(np.isfinite(d)):
        a, b = np.argwhere(~np.isfinite(d))[0]
        raise SpaceError(f"graph is disconnected: infinite distance between {a} and {b}")
    return repair_triangle(d)


def line(n: int, spacing: float = 1.0, weights=None, seed=None) -> MetricMeasureSpace:
    x = np.arange(n, dtype=np.float64) * spacing
    d = np.abs(x[:, None] - x[None, :])
    return build_space(d, _weights(n, weights, seed), label=f"line({n})")


def grid(rows: int, cols: int, spacing: float = 1.0, p: float = 2.0, weights=None, seed=None):
    ii, jj = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    coords = np.column_stack([ii.ravel(), jj.ravel()]) * spacing
    d = euclidean_distances(coords, p)
    return build_space(d, _weights(rows * cols, weights, seed), label=f"grid({rows}x{cols})")


def ultrametric_dyadic(depth: int, scale: float = 1.0, weights=None, seed=None):
    """Leaves of a binary tree of the given depth; siblings at distance ``scale``.

    ``d(i, j) = scale * 2**(h - 1)`` where ``h`` is the bit length of ``i ^ j``.
    """
    n = 2**depth
    idx = np.arange(n)
    h = np.zeros((n, n), dtype=np.int64)
    x = idx[:, None] ^ idx[None, :]
    while np.any(x):
        h += x > 0
        x >>= 1
    d = np.where(h > 0, scale * np.exp2(h - 1.0), 0.0)
    return build_space(d, _weights(n, weights, seed), label=f"ultrametric({depth})")


def snowflake(base: MetricMeasureSpace, alpha: float) -> MetricMeasureSpace:
    if not 0 < alpha < 1:
        raise ValueError(f"snowflake exponent must lie in (0, 1), got {alpha}")
    d = np.power(base.dist, alpha)
    return build_space(d, base.weight, label=f"snowflake({base.label or 'space'}, {alpha:g})")


def random_points(n: int, dim: int = 2, seed=None, p: float = 2.0, side: float = 1.0,
                  lattice: float | None = None, weights=None) -> MetricMeasureSpace:
    """Uniform points in a cube, optionally snapped to a lattice (duplicates dropped)."""
    if seed is None:
        raise ValueError("random_points needs a seed")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, side, size=(n, dim))
    if lattice:
        pts = np.unique(np.round(pts / lattice) * lattice, axis=0)
    d = euclidean_distances(pts, p)
    return build_space(d, _weights(pts.shape[0], weights, seed), label=f"random_points({pts.shape[0]},{dim})")


def graph_space(n: int, edges, weights=None, seed=None) -> MetricMeasureSpace:
    return build_space(graph_distances(n, edges), _weights(n, weights, seed), label=f"graph({n})")


def generate_space(kind: str, params: dict[str, Any] | None = None, **kw) -> MetricMeasureSpace:
    """Build a space of the named ``kind`` from a parameter mapping.

    Kinds: ``line``, ``grid``, ``graph_shortest_path``, ``ultrametric_dyadic``,
    ``snowflake`` (``base`` is a space or a nested ``{"kind", "params"}``
    mapping) and ``random_points`` (``seed`` required).
    """
    p = dict(params or {}, **kw)
    if kind == "line":
        return line(**p)
    if kind == "grid":
        return grid(**p)
    if kind == "graph_shortest_path":
        return graph_space(**p)
    if kind == "ultrametric_dyadic":
        return ultrametric_dyadic(**p)
    if kind == "snowflake":
        base = p.pop("base")
        if isinstance(base, dict):
            base = generate_space(base["kind"], base.get("params", {}))
        return snowflake(base, **p)
    if kind == "random_points":
        return random_points(**p)
    raise ValueError(f"unknown space kind {kind!r}; expected one of {', '.join(KINDS)}")
