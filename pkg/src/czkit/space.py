"""Finite metric measure spaces, open balls, exact doubling profiles and nets."""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .backend import kernels

FULL_TRIANGLE_CHECK_MAX_N = 300
SAMPLED_TRIPLES = 200_000


class SpaceError(ValueError):
    """Raised when inputs do not describe a valid finite metric measure space."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(eq=False)
class MetricMeasureSpace:
    """A finite set with a distance matrix and strictly positive point masses.

    Instances are immutable: ``dist`` and ``weight`` are read-only arrays and
    every derived quantity is computed once and cached.  Build them with
    :func:`build_space`, which validates the metric axioms.
    """

    dist: np.ndarray
    weight: np.ndarray
    label: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @cached_property
    def critical_distances(self) -> np.ndarray:
        d = self.dist[np.triu_indices(self.n, k=1)]
        return _readonly(np.unique(d))

    @cached_property
    def order(self) -> np.ndarray:
        # stable sort: ties by point index
        return _readonly(np.ascontiguousarray(np.argsort(self.dist, axis=1, kind="stable"), dtype=np.int64))

    @cached_property
    def sorted_dist(self) -> np.ndarray:
        return _readonly(np.ascontiguousarray(np.take_along_axis(self.dist, self.order, axis=1)))

    @cached_property
    def cum_weight(self) -> np.ndarray:
        """``cum_weight[x, k]``: mass of the ``k + 1`` points nearest ``x``."""
        return _readonly(np.ascontiguousarray(np.cumsum(self.weight[self.order], axis=1)))

    @cached_property
    def total_mass(self) -> float:
        return float(np.cumsum(self.weight)[-1])

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @cached_property
    def min_distance(self) -> float:
        return float(self.critical_distances[0]) if self.n > 1 else np.inf

    @cached_property
    def _doubling_table(self) -> tuple[np.ndarray, np.ndarray]:
        a, v = kernels.doubling_pairs(self.sorted_dist, self.cum_weight)
        idx = np.argsort(a, kind="stable")
        a, v = a[idx], v[idx]
        return _readonly(a), _readonly(np.maximum.accumulate(v) if v.size else v)

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label else ""
        return f"<MetricMeasureSpace{tag} n={self.n} mass={self.total_mass:g} diam={self.diameter:g}>"


@dataclass(frozen=True)
class Ball:
    """The open ball ``{y : d(center, y) < radius}``."""

    center: int
    radius: float

    def members(self, space: MetricMeasureSpace) -> np.ndarray:
        return ball_members(space, self.center, self.radius)

    def measure(self, space: MetricMeasureSpace) -> float:
        return ball_measure(space, self.center, self.radius)


@dataclass(frozen=True)
class DoublingProfile:
    """Exact ``R -> D_R`` as a step function.

    ``values[i]`` holds on ``(breakpoints[i - 1], breakpoints[i]]`` (with
    ``breakpoints[-1] = 0``); the last value holds up to ``r_max``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    r_max: float
    exact: bool = True

    def __call__(self, R: float) -> float:
        if not R > 0:
            raise ValueError(f"radius must be positive, got {R}")
        if R > self.r_max:
            raise ValueError(f"profile computed up to {self.r_max}, asked for {R}")
        return self.values[bisect.bisect_left(self.breakpoints, R)]

    def rows(self) -> list[tuple[float, float, float]]:
        """``(lo, hi, value)`` triples covering ``(0, r_max]``."""
        edges = (0.0,) + self.breakpoints + (self.r_max,)
        return [(edges[i], edges[i + 1], self.values[i]) for i in range(len(self.values))]


@dataclass(frozen=True)
class SeparatedNet:
    delta: float
    members: tuple[int, ...]


def build_space(dist, weight=None, label: str = "") -> MetricMeasureSpace:
    """Validate a distance matrix and point masses and wrap them.

    Raises :class:`SpaceError` on asymmetry, a nonzero diagonal, a zero
    off-diagonal distance, a triangle-inequality violation (naming the
    witnessing triple) or a nonpositive weight.  Comparisons are exact.
    """
    dist = np.array(dist, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise SpaceError(f"distance matrix must be square, got shape {dist.shape}")
    n = dist.shape[0]
    if n == 0:
        raise SpaceError("space must have at least one point")
    weight = np.ones(n) if weight is None else np.array(weight, dtype=np.float64).reshape(-1)
    if weight.shape != (n,):
        raise SpaceError(f"expected {n} weights, got {weight.shape[0]}")
    if not np.all(np.isfinite(dist)):
        raise SpaceError("distances must be finite")
    if not np.all(np.isfinite(weight)) or np.any(weight <= 0):
        bad = int(np.flatnonzero(~(weight > 0) | ~np.isfinite(weight))[0])
        raise SpaceError(f"weights must be strictly positive and finite (point {bad}: {weight[bad]})")
    if np.any(np.diag(dist) != 0):
        bad = int(np.flatnonzero(np.diag(dist) != 0)[0])
        raise SpaceError(f"nonzero diagonal at point {bad}")
    asym = np.argwhere(dist != dist.T)
    if asym.size:
        i, j = map(int, asym[0])
        raise SpaceError(f"asymmetric distance: d[{i}][{j}]={dist[i, j]} but d[{j}][{i}]={dist[j, i]}")
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] <= 0):
        i, j = map(int, np.argwhere((dist <= 0) & off)[0])
        raise SpaceError(f"distinct points {i} and {j} at distance {dist[i, j]}")
    witness = _triangle_witness(dist)
    if witness is not None:
        i, k, j = witness
        raise SpaceError(
            f"triangle violation at ({i},{k}) via {j}: "
            f"{dist[i, k]} > {dist[i, j]} + {dist[j, k]}"
        )
    return MetricMeasureSpace(_readonly(np.ascontiguousarray(dist)), _readonly(weight), label)


def _triangle_witness(dist: np.ndarray):
    n = dist.shape[0]
    if n <= FULL_TRIANGLE_CHECK_MAX_N:
        return kernels.triangle_violation(np.ascontiguousarray(dist))
    rng = np.random.default_rng(0)
    i, j, k = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
    bad = np.flatnonzero(dist[i, k] > dist[i, j] + dist[j, k])
    if bad.size == 0:
        return None
    t = bad[0]
    a, b = sorted((int(i[t]), int(k[t])))
    return a, b, int(j[t])


def _check_index(space: MetricMeasureSpace, x: int) -> int:
    if not 0 <= x < space.n:
        raise IndexError(f"point {x} out of range for a space with {space.n} points")
    return int(x)


def _check_radius(r: float) -> float:
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    return float(r)


def ball_members(space: MetricMeasureSpace, x: int, r: float) -> np.ndarray:
    """Indices ``y`` with ``d(x, y) < r`` (strict), ascending."""
    x = _check_index(space, x)
    return np.flatnonzero(space.dist[x] < _check_radius(r))


def ball_measure(space: MetricMeasureSpace, x: int, r: float) -> float:
    x = _check_index(space, x)
    k = int(np.searchsorted(space.sorted_dist[x], _check_radius(r), side="left"))
    return float(space.cum_weight[x, k - 1])


def ball_measures(space: MetricMeasureSpace, r: float) -> np.ndarray:
    """``V_r(x) = mu(B(x, r))`` for every ``x``."""
    r = _check_radius(r)
    k = (space.sorted_dist < r).sum(axis=1)
    return space.cum_weight[np.arange(space.n), k - 1]


def set_diameter(space: MetricMeasureSpace, idx) -> float:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return 0.0
    return float(space.dist[np.ix_(idx, idx)].max())


def distance_to_set(space: MetricMeasureSpace, idx) -> np.ndarray:
    """``d(x, S)`` for every ``x`` (``inf`` for an empty ``S``)."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return np.full(space.n, np.inf)
    return space.dist[:, idx].min(axis=1)


def neighborhood(space: MetricMeasureSpace, idx, rho: float) -> np.ndarray:
    """``B(S, rho) = {y : d(y, S) < rho}``."""
    return np.flatnonzero(distance_to_set(space, idx) < rho)


def set_measure(space: MetricMeasureSpace, idx) -> float:
    idx = np.asarray(idx, dtype=np.int64)
    return float(space.weight[idx].sum()) if idx.size else 0.0


def doubling_constant(space: MetricMeasureSpace, R: float) -> float:
    """Exact ``D_R = sup_{x, 0 < r <= R} mu(B(x, 2r)) / mu(B(x, r))``."""
    R = _check_radius(R)
    a, vmax = space._doubling_table
    k = bisect.bisect_left(a, R)
    return float(vmax[k - 1]) if k > 0 else 1.0


def doubling_profile(space: MetricMeasureSpace, r_max: float) -> DoublingProfile:
    r_max = _check_radius(r_max)
    a, vmax = space._doubling_table
    breaks: list[float] = []
    values: list[float] = [1.0]
    for left, v in zip(a, vmax):
        if left >= r_max:
            break
        if v > values[-1]:
            if breaks and breaks[-1] == left:
                values[-1] = float(v)
            elif left == 0.0:
                values[0] = float(v)
            else:
                breaks.append(float(left))
                values.append(float(v))
    return DoublingProfile(tuple(breaks), tuple(values), r_max, exact=True)


def separated_net(space: MetricMeasureSpace, delta: float) -> SeparatedNet:
    """Greedy maximal ``delta``-separated set, scanning points by index."""
    delta = _check_radius(delta)
    members: list[int] = []
    nearest = np.full(space.n, np.inf)
    for x in range(space.n):
        if nearest[x] >= delta:
            members.append(x)
            np.minimum(nearest, space.dist[x], out=nearest)
    return SeparatedNet(delta, tuple(members))
