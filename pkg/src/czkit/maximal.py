"""Truncated centred and uncentred maximal operators and their quantitative checks."""
from __future__ import annotations

import math

import numpy as np

from .backend import kernels
from .functions import FunctionOnSpace, as_function, lp_norm, _parse_exponent
from .reports import BoundReport, merge
from .space import MetricMeasureSpace, doubling_constant, set_diameter

# (a * w) / w may land one ulp away from a
AVERAGE_ULPS = 4


def maximal_batch(space: MetricMeasureSpace, vals, R: float, centred: bool) -> np.ndarray:
    """Maximal function of each nonnegative column of ``vals`` (``n x m``)."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    if vals.ndim == 1:
        vals = vals[:, None]
    return kernels.maximal_sweep(
        space.order, space.sorted_dist, space.cum_weight, space.weight, vals, float(R), bool(centred)
    )


def maximal_centred(space: MetricMeasureSpace, f, R: float) -> np.ndarray:
    """``(M~_R f)(x)``: largest average of ``|f|`` over ``B(x, r)``, ``0 < r <= R``."""
    f = as_function(f, space.n)
    return maximal_batch(space, f.abs(), R, True)[:, 0]


def maximal_uncentred(space: MetricMeasureSpace, f, R: float) -> np.ndarray:
    """``(M_R f)(x)``: largest average of ``|f|`` over balls ``B(y, r) ∋ x``, ``0 < r <= R``."""
    f = as_function(f, space.n)
    return maximal_batch(space, f.abs(), R, False)[:, 0]


def _pointwise(name: str, constant: float, lhs: np.ndarray, rhs: np.ndarray) -> BoundReport:
    """Worst point of ``lhs <= constant * rhs``."""
    bound = constant * rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs == 0, 0.0, np.where(bound == 0, np.inf, lhs / bound))
    x = int(np.argmax(ratio))
    return BoundReport.inequality(name, constant, lhs[x], rhs[x], witness=x)


def check_comparison(space: MetricMeasureSpace, f, R: float) -> BoundReport:
    """``M~_R f <= M_R f <= D_R M~_{2R} f`` pointwise; the worse of the two."""
    f = as_function(f, space.n)
    absf = f.abs()
    cen = maximal_batch(space, absf, R, True)[:, 0]
    unc = maximal_batch(space, absf, R, False)[:, 0]
    cen2 = maximal_batch(space, absf, 2 * R, True)[:, 0]
    D = doubling_constant(space, R)
    lower = _pointwise("maximal.centred_le_uncentred", 1.0, cen, unc)
    upper = _pointwise("maximal.uncentred_le_DR_centred_2R", D, unc, cen2)
    out = merge("maximal.comparison", [lower, upper])
    out.details.update(lower_ratio=lower.ratio, upper_ratio=upper.ratio, D_R=D)
    return out


def _check_E(space: MetricMeasureSpace, E, R: float) -> np.ndarray:
    E = np.arange(space.n) if E is None else np.unique(np.asarray(E, dtype=np.int64))
    diam = set_diameter(space, E)
    if not diam < 6 * R:
        raise ValueError(f"diam(E) = {diam} is not below 6R = {6 * R}")
    return E


def check_weak11(space: MetricMeasureSpace, f, E=None, R: float = 1.0, lambda_grid=None) -> BoundReport:
    """``lambda * mu{x in E : M_R f(x) > lambda} <= D_{3R}^4 ||f||_1``.

    Without ``lambda_grid`` every jump of the level-set measure is checked
    through its left limit: ``v * mu{M_R f >= v}`` for each distinct value
    ``v > 0`` of ``M_R f`` on ``E``, which is the supremum over ``lambda``.
    """
    f = as_function(f, space.n)
    E = _check_E(space, E, R)
    M = maximal_uncentred(space, f, R)[E]
    wE = space.weight[E]
    C = doubling_constant(space, 3 * R) ** 4
    norm1 = f.lp_norm(space, 1)
    if lambda_grid is None:
        levels = np.unique(M[M > 0])
        # mu{M >= v} by a descending cumulative sum over the sorted values
        srt = np.argsort(-M, kind="stable")
        cum = np.cumsum(wE[srt])
        pos = np.searchsorted(-M[srt], -levels, side="right") - 1
        lhs = levels * cum[pos]
        mode = "left_limit"
    else:
        levels = np.asarray(lambda_grid, dtype=np.float64)
        if np.any(levels <= 0):
            raise ValueError("lambda values must be positive")
        lhs = np.array([lam * wE[M > lam].sum() for lam in levels])
        mode = "strict"
    if levels.size == 0:
        return BoundReport.inequality("maximal.weak11", C, 0.0, norm1, levels=0, mode=mode)
    k = int(np.argmax(lhs))
    return BoundReport.inequality(
        "maximal.weak11", C, lhs[k], norm1, witness=float(levels[k]), levels=int(levels.size), mode=mode
    )


def lp_constant(p: float, D3R: float) -> float:
    """``2 p'^{1/p} D_{3R}^{4/p}``."""
    if p == math.inf:
        return 2.0
    pp = p / (p - 1.0)
    return 2.0 * pp ** (1.0 / p) * D3R ** (4.0 / p)


def check_lp_bound(space: MetricMeasureSpace, f, E=None, R: float = 1.0, p=2.0) -> BoundReport:
    """``||chi_E M_R f||_p <= 2 p'^{1/p} D_{3R}^{4/p} ||f||_p`` for ``p`` in ``(1, inf]``."""
    p = _parse_exponent(p)
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    f = as_function(f, space.n)
    E = _check_E(space, E, R)
    M = maximal_uncentred(space, f, R)
    lhs = lp_norm(M[E], space.weight[E], p)
    C = lp_constant(p, doubling_constant(space, 3 * R))
    return BoundReport.inequality(f"maximal.lp[p={p:g}]", C, lhs, f.lp_norm(space, p), p=p)


def check_lebesgue_points(space: MetricMeasureSpace, f) -> BoundReport:
    """Averages over balls below the nearest-neighbour distance reproduce ``f(x)``.

    Such balls are singletons, so the average is ``f(x) w(x) / w(x)``; the
    comparison allows the few ulps that this round trip can cost.
    """
    f = as_function(f, space.n)
    v = f.values
    w = space.weight[:, None]
    avg = (v * w) / w
    err = np.abs(avg - v)
    tol = AVERAGE_ULPS * np.spacing(np.abs(v))
    bad = np.argwhere(err > tol)
    radii = space.sorted_dist[:, 1] if space.n > 1 else np.full(1, np.inf)
    scale = np.maximum(np.abs(v), np.finfo(float).tiny)
    return BoundReport.inequality(
        "maximal.lebesgue_points",
        1.0,
        float((err / scale).max()) if err.size else 0.0,
        AVERAGE_ULPS * np.finfo(float).eps,
        witness=tuple(map(int, bad[0])) if bad.size else None,
        min_radius=float(radii.min()),
    )
