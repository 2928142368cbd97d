"""Greedy Vitali covers and Whitney covers with bounded overlap."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reports import BoundReport
from .space import (
    MetricMeasureSpace,
    SpaceError,
    distance_to_set,
    doubling_constant,
    set_diameter,
)

ESCAPE_KAPPA = 2.0 + 2.0**-20


@dataclass(frozen=True)
class VitaliCover:
    """Centres ``N`` (in selection order) with radii and the covered set.

    ``step_max[j]`` is the largest radius left in ``E_j`` when ``centers[j]``
    was chosen; the greedy rule guarantees ``radii[j] == step_max[j]``.
    """

    centers: tuple[int, ...]
    radii: tuple[float, ...]
    target: tuple[int, ...]
    step_max: tuple[float, ...]


@dataclass(frozen=True)
class WhitneyCover:
    centers: tuple[int, ...]
    radii: tuple[float, ...]
    overlap_bound: float
    target: tuple[int, ...]
    R: float


def _index_set(space: MetricMeasureSpace, idx, what: str) -> np.ndarray:
    idx = np.unique(np.asarray(idx, dtype=np.int64).reshape(-1))
    if idx.size and (idx[0] < 0 or idx[-1] >= space.n):
        raise IndexError(f"{what} contains a point outside 0..{space.n - 1}")
    return idx


def _radii_on(E: np.ndarray, r, n: int) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if r.size == 1:
        return np.full(E.size, float(r[0]))
    if r.size == E.size:
        return r
    if r.size == n:
        return r[E]
    raise ValueError(f"radii must be a scalar, one per point of E ({E.size}) or one per point ({n})")


def ball_counts(space: MetricMeasureSpace, centers, radii) -> np.ndarray:
    """``sum_x chi_{B(x, r(x))}`` evaluated at every point."""
    counts = np.zeros(space.n, dtype=np.int64)
    for x, r in zip(centers, radii):
        counts += space.dist[x] < r
    return counts


def vitali_cover(space: MetricMeasureSpace, E, r, R: float, enforce_diameter: bool = True) -> VitaliCover:
    """Greedy disjoint subfamily of ``{B(x, r(x)) : x in E}`` whose triples cover ``E``.

    At each step the point of ``E_j`` with the largest radius is chosen
    (lowest index on ties) and ``E_{j+1} = E_j \\ B(x_j, 3 r(x_j))``.

    Parameters
    ----------
    E : index set
    r : scalar, or radii aligned with ``E`` (sorted ascending), or one per point
    R : float
        Radii must lie in ``(0, R]`` and ``diam(E) < 2R`` unless
        ``enforce_diameter`` is off.
    """
    E = _index_set(space, E, "E")
    if E.size == 0:
        raise ValueError("E must be nonempty")
    rE = _radii_on(E, r, space.n)
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    bad = np.flatnonzero(~((rE > 0) & (rE <= R)))
    if bad.size:
        x = int(E[bad[0]])
        raise ValueError(f"radius at point {x} is {rE[bad[0]]}, outside (0, {R}]")
    if enforce_diameter:
        diam = set_diameter(space, E)
        if not diam < 2 * R:
            raise ValueError(f"diam(E) = {diam} is not below 2R = {2 * R}")

    alive = np.ones(E.size, dtype=bool)
    dE = space.dist[:, E]
    centers, radii, step_max = [], [], []
    while alive.any():
        masked = np.where(alive, rE, -np.inf)
        j = int(np.argmax(masked))
        x, rx = int(E[j]), float(rE[j])
        centers.append(x)
        radii.append(rx)
        step_max.append(float(masked[j]))
        alive &= ~(dE[x] < 3.0 * rx)
    return VitaliCover(tuple(centers), tuple(radii), tuple(int(e) for e in E), tuple(step_max))


def check_vitali(space: MetricMeasureSpace, cover: VitaliCover, r=None) -> list[BoundReport]:
    """Disjointness, 3r-coverage and the greedy certificate, as set-level reports."""
    counts = ball_counts(space, cover.centers, cover.radii)
    worst = int(np.argmax(counts))
    disjoint = BoundReport.inequality(
        "vitali.disjoint", 1.0, float(counts[worst]), 1.0, witness=worst
    )
    triple = ball_counts(space, cover.centers, [3.0 * q for q in cover.radii])
    target = np.asarray(cover.target, dtype=np.int64)
    missed = target[triple[target] == 0]
    covers = BoundReport.condition(
        "vitali.covers_E", missed.size == 0, witness=int(missed[0]) if missed.size else None
    )
    reports = [disjoint, covers]
    if r is not None:
        rE = _radii_on(target, r, space.n)
        lookup = dict(zip(target.tolist(), rE.tolist()))
        alive = np.ones(target.size, dtype=bool)
        ok, wit = True, None
        for x, rx, smax in zip(cover.centers, cover.radii, cover.step_max):
            left = rE[alive]
            if lookup[x] != rx or smax != left.max() or rx < left.max():
                ok, wit = False, x
                break
            alive &= ~(space.dist[x, target] < 3.0 * rx)
        reports.append(BoundReport.condition("vitali.greedy_max", ok, witness=wit))
    return reports


def whitney_cover(space: MetricMeasureSpace, U, R: float) -> WhitneyCover:
    """Whitney-type cover of a proper subset ``U`` by balls of radius ``d(x, X \\ U) / 2``.

    Requires ``diam(U) < R`` and ``d(x, X \\ U) <= R`` for every ``x`` in ``U``
    (the finite-space stand-in for connectedness).
    """
    U = _index_set(space, U, "U")
    if U.size == 0:
        raise ValueError("U must be nonempty")
    if U.size == space.n:
        raise SpaceError("U must be a proper subset: X \\ U is empty")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    diam = set_diameter(space, U)
    if not diam < R:
        raise ValueError(f"diam(U) = {diam} is not below R = {R}")
    outside = np.setdiff1d(np.arange(space.n), U)
    dU = distance_to_set(space, outside)[U]
    far = np.flatnonzero(dU > R)
    if far.size:
        x = int(U[far[0]])
        raise ValueError(f"boundary condition fails at point {x}: d(x, X\\U) = {dU[far[0]]} > R = {R}")
    rprime = dU / 6.0
    vc = vitali_cover(space, U, rprime, R)
    radii = tuple(3.0 * q for q in vc.radii)
    return WhitneyCover(vc.centers, radii, doubling_constant(space, R) ** 5, vc.target, float(R))


def check_whitney(space: MetricMeasureSpace, cover: WhitneyCover) -> list[BoundReport]:
    """Overlap sandwich, disjoint third-balls, escape at ``kappa = 2 + 2**-20``, radius range."""
    U = np.asarray(cover.target, dtype=np.int64)
    inU = np.zeros(space.n, dtype=bool)
    inU[U] = True
    counts = ball_counts(space, cover.centers, cover.radii)
    reports = []
    low = U[counts[U] < 1]
    reports.append(
        BoundReport.condition("whitney.covers_U", low.size == 0, witness=int(low[0]) if low.size else None)
    )
    worst = int(U[np.argmax(counts[U])])
    reports.append(
        BoundReport.inequality(
            "whitney.overlap", cover.overlap_bound, float(counts[worst]), 1.0, witness=worst,
            histogram=np.bincount(counts[U]).tolist(),
        )
    )
    stray = np.flatnonzero((counts > 0) & ~inU)
    reports.append(
        BoundReport.condition("whitney.inside_U", stray.size == 0, witness=int(stray[0]) if stray.size else None)
    )
    thirds = ball_counts(space, cover.centers, [q / 3.0 for q in cover.radii])
    w3 = int(np.argmax(thirds))
    reports.append(BoundReport.inequality("whitney.third_disjoint", 1.0, float(thirds[w3]), 1.0, witness=w3))
    stuck = [
        x for x, r in zip(cover.centers, cover.radii)
        if not np.any((space.dist[x] < ESCAPE_KAPPA * r) & ~inU)
    ]
    reports.append(BoundReport.condition("whitney.escape", not stuck, witness=stuck[0] if stuck else None))
    rr = np.asarray(cover.radii)
    in_range = bool(np.all((rr > 0) & (rr <= cover.R / 2)))
    reports.append(BoundReport.condition("whitney.radius_range", in_range))
    return reports
