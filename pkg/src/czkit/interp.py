"""The interpolation constant ``phi(r, p)`` and the Marcinkiewicz constant built on it.

For ``1 < p <= r < inf``::

    phi(r, p) = inf_{1 < q < p} (q' + 1 / (r/q - 1)) ** ((1/p - 1/r) / (1 - q/r))

``phi(inf, p) = p'^{1/p}`` and ``phi(r, p) = phi(r', p')`` for ``p >= r``.
The infimum is located on the log of the objective: a coarse scan brackets
the best cell and a golden-section search refines it.  The objective
extends continuously to ``q = p`` (where it equals ``(p' + 1/(r/p - 1))^{1/p}``),
so that endpoint is a candidate too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf
Q_FLOOR = 1e-8
SCAN_POINTS = 1025
GOLDEN_TOL = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PhiQuery:
    r: float
    p: float
    value: float
    minimizer_q: float | None
    method: str


def conjugate(p: float) -> float:
    """Hölder conjugate ``p' = p / (p - 1)``, with ``1' = inf`` and ``inf' = 1``."""
    if p == INF:
        return 1.0
    if p == 1:
        return INF
    return p / (p - 1.0)


def _check(r: float, p: float) -> tuple[float, float]:
    r, p = float(r), float(p)
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    if not (p > 1 and p < INF):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    return r, p


def log_objective(q, r: float, p: float):
    """``log`` of the minimised expression, vectorised over ``q`` in ``(1, p]``."""
    q = np.asarray(q, dtype=np.float64)
    base = q / (q - 1.0) + q / (r - q)
    expo = (1.0 / p - 1.0 / r) / (1.0 - q / r)
    return expo * np.log(base)


def _minimise(r: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised bracket-and-refine over pairs with ``1 < p < r < inf``."""
    lo = 1.0 + Q_FLOOR
    t = np.linspace(0.0, 1.0, SCAN_POINTS)
    Q = lo + (p[:, None] - lo) * t[None, :]
    L = log_objective(Q, r[:, None], p[:, None])
    k = np.argmin(L, axis=1)
    rows = np.arange(r.size)
    a = Q[rows, np.maximum(k - 1, 0)]
    b = Q[rows, np.minimum(k + 1, SCAN_POINTS - 1)]
    best_q = Q[rows, k]
    best_L = L[rows, k]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    Lc = log_objective(c, r, p)
    Ld = log_objective(d, r, p)
    for _ in range(200):
        # converged rows are frozen so each result is independent of its batch
        active = b - a > GOLDEN_TOL * b
        if not active.any():
            break
        left = Lc < Ld
        a_new = np.where(left, a, c)
        b_new = np.where(left, d, b)
        q_new = np.where(left, b_new - _INVPHI * (b_new - a_new), a_new + _INVPHI * (b_new - a_new))
        L_new = log_objective(q_new, r, p)
        c_new, d_new = np.where(left, q_new, d), np.where(left, c, q_new)
        Lc_new, Ld_new = np.where(left, L_new, Ld), np.where(left, Lc, L_new)
        a, b = np.where(active, a_new, a), np.where(active, b_new, b)
        c, d = np.where(active, c_new, c), np.where(active, d_new, d)
        Lc, Ld = np.where(active, Lc_new, Lc), np.where(active, Ld_new, Ld)
    mid = 0.5 * (a + b)
    cands_q = np.stack([best_q, mid, p, np.clip(np.sqrt(r), lo, p)], axis=1)
    cands_L = log_objective(cands_q, r[:, None], p[:, None])
    cands_L[:, 0] = best_L
    j = np.argmin(cands_L, axis=1)
    return cands_L[rows, j], cands_q[rows, j]


def phi_query(r: float, p: float) -> PhiQuery:
    r, p = _check(r, p)
    if r == INF:
        pp = conjugate(p)
        return PhiQuery(r, p, pp ** (1.0 / p), None, "closed_form")
    if p == r:
        return PhiQuery(r, p, 1.0, None, "closed_form")
    if p > r:
        inner = phi_query(conjugate(r), conjugate(p))
        return PhiQuery(r, p, inner.value, inner.minimizer_q, "symmetry")
    L, q = _minimise(np.array([r]), np.array([p]))
    return PhiQuery(r, p, float(np.exp(L[0])), float(q[0]), "minimized")


def phi(r: float, p: float) -> float:
    """``phi(r, p)`` for ``r`` in ``(1, inf]`` and ``p`` in ``(1, inf)``."""
    return phi_query(r, p).value


def phi_many(r, p) -> np.ndarray:
    """``phi`` over broadcast arrays of ``r`` and ``p``; one minimisation pass for all."""
    r, p = np.broadcast_arrays(np.asarray(r, dtype=np.float64), np.asarray(p, dtype=np.float64))
    shape = r.shape
    r, p = r.ravel().copy(), p.ravel().copy()
    if np.any(~(r > 1)) or np.any(~(p > 1)) or np.any(p == INF):
        raise ValueError("phi needs r in (1, inf] and p in (1, inf)")
    out = np.empty(r.size)
    fin = np.isfinite(r)
    swap = fin & (p > r)
    r[swap], p[swap] = r[swap] / (r[swap] - 1.0), p[swap] / (p[swap] - 1.0)
    out[~fin] = (p[~fin] / (p[~fin] - 1.0)) ** (1.0 / p[~fin])
    eq = fin & (p == r)
    out[eq] = 1.0
    todo = fin & (p < r)
    if todo.any():
        L, _ = _minimise(r[todo], p[todo])
        out[todo] = np.exp(L)
    return out.reshape(shape)


def phi_upper_bounds(r: float, p: float) -> tuple[float, float]:
    """The two closed-form majorants of ``phi(r, p)`` for ``1 < p <= r < inf``.

    The first comes from ``q -> sqrt(r)`` and applies when
    ``sqrt(r) <= p <= r``; the second from ``q -> p`` and applies when
    ``p <= sqrt(r)``.  Outside its regime a bound is returned as ``nan``.
    """
    r, p = _check(r, p)
    if r == INF or p > r:
        raise ValueError(f"closed-form bounds need 1 < p <= r < inf, got r={r}, p={p}")
    s = math.sqrt(r)
    expo = 1.0 / p - 1.0 / r
    first = ((s + 1.0) / (s - 1.0)) ** (expo / (1.0 - 1.0 / s)) if s <= p else math.nan
    if p <= s:
        second = (conjugate(p) + 1.0 / (r / p - 1.0)) ** (1.0 / p) if p < r else 1.0
    else:
        second = math.nan
    return first, second


def marcinkiewicz_constant(A: float, B: float, r: float, p: float) -> float:
    """``2 phi(r, p) A^{r'(1/p - 1/r)} B^{r'/p'}`` for ``p`` in ``(1, r]``."""
    r, p = _check(r, p)
    if not (A > 0 and B > 0):
        raise ValueError("A and B must be positive")
    if p > r:
        raise ValueError(f"p = {p} exceeds r = {r}")
    rc = conjugate(r)
    inv_r = 0.0 if r == INF else 1.0 / r
    return 2.0 * phi(r, p) * A ** (rc * (1.0 / p - inv_r)) * B ** (rc / conjugate(p))


def in_region(r: float, p: float, C1: float, C2: float) -> bool:
    """``r, p >= C1`` and ``p <= min(C2 r, r / (1 - C2 / log r)_+)``."""
    if r < C1 or p < C1:
        return False
    if r == INF:
        return True
    cap = 1.0 - C2 / math.log(r)
    second = r / cap if cap > 0 else INF
    return p <= min(C2 * r, second)


def phi_region_sup(C1: float, C2: float, grid_size: int = 200, r_max: float = 1e6) -> dict:
    """Sampled supremum of ``phi`` over the bounded-constant region.

    ``r`` runs over a log-spaced grid on ``[C1, r_max]`` plus ``r = inf``;
    ``p`` over a log-spaced grid on ``[C1, C2 r_max]``.  Returns the
    supremum, the point attaining it and the number of points sampled.
    """
    if not (C1 > 1 and C2 > 1):
        raise ValueError("C1 and C2 must exceed 1")
    if grid_size < 1:
        raise ValueError("grid_size must be positive")
    if grid_size == 1:
        rs = np.array([C1])
        ps = np.array([C1])
    else:
        rs = np.append(np.geomspace(C1, r_max, grid_size - 1), INF)
        ps = np.geomspace(C1, C2 * r_max, grid_size)
    R, P = np.meshgrid(rs, ps, indexing="ij")
    mask = np.array([[in_region(r, p, C1, C2) for p in ps] for r in rs])
    vals = phi_many(R[mask], P[mask])
    k = int(np.argmax(vals))
    return {"sup": float(vals[k]), "r": float(R[mask][k]), "p": float(P[mask][k]), "points": int(mask.sum())}
