"""Local Calderon-Zygmund decomposition at an admissible threshold."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covering import ball_counts, whitney_cover
from .functions import FunctionOnSpace, as_function
from .maximal import maximal_uncentred
from .reports import BoundReport
from .space import MetricMeasureSpace, doubling_constant, neighborhood, set_diameter, set_measure

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CZDecomposition:
    """``f = g + sum_x h_x`` with the data that certifies it.

    ``eta[j]`` and ``h[j]`` belong to ``centers[j]``; ``eta[j]`` holds the
    partition weights on ``ball_members[j]``.
    """

    f: FunctionOnSpace
    alpha: float
    kappa: float
    R: float
    E: tuple[int, ...]
    bad_set: tuple[int, ...]
    centers: tuple[int, ...]
    radii: tuple[float, ...]
    ball_members: tuple[np.ndarray, ...]
    eta: tuple[np.ndarray, ...]
    g: FunctionOnSpace
    h: tuple[FunctionOnSpace, ...]
    D: float
    halo: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "kappa": self.kappa,
            "R": self.R,
            "D_3kR": self.D,
            "E": list(self.E),
            "bad_set": list(self.bad_set),
            "centers": list(self.centers),
            "radii": list(self.radii),
            "g": self.g.values.tolist(),
        }


def admissible_alpha(space: MetricMeasureSpace, f, E, R: float, kappa: float) -> float:
    """The threshold ``D_{3 kappa R}^4 ||f||_1 / mu(E)``; ``alpha`` must exceed it."""
    f = as_function(f, space.n)
    D = doubling_constant(space, 3 * kappa * R)
    return D**4 * f.lp_norm(space, 1) / set_measure(space, E)


def cz_decompose(space: MetricMeasureSpace, f, E, R: float, kappa: float, alpha: float) -> CZDecomposition:
    """Split ``f`` into a bounded part ``g`` and mean-zero pieces ``h_x``.

    The bad set is ``U = {M_{kappa R} f > alpha}``, covered by Whitney balls
    (scale ``2R``, so radii lie in ``(0, R]``).  Then ``eta_x`` is the
    normalised indicator of ``B(x, r(x))``,
    ``h_x = f eta_x - avg_{B_x}(f eta_x) chi_{B_x}`` and ``g = f - sum h_x``
    assembled directly.

    Raises
    ------
    ValueError
        ``kappa`` outside ``(2, 3]``, ``diam(E) >= R``, ``f`` not concentrated
        in ``E``, ``alpha`` not above the admissibility threshold, or a bad
        set that fails the Whitney boundary condition.
    """
    f = as_function(f, space.n)
    E = np.unique(np.asarray(E, dtype=np.int64))
    if E.size == 0:
        raise ValueError("E must be nonempty")
    if not 2 < kappa <= 3:
        raise ValueError(f"kappa must lie in (2, 3], got {kappa}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    diam = set_diameter(space, E)
    if not diam < R:
        raise ValueError(f"diam(E) = {diam} is not below R = {R}")
    outside = np.setdiff1d(f.support, E)
    if outside.size:
        raise ValueError(f"f is not concentrated in E: f({int(outside[0])}) != 0")
    D = doubling_constant(space, 3 * kappa * R)
    threshold = D**4 * f.lp_norm(space, 1) / set_measure(space, E)
    if not alpha > threshold:
        raise ValueError(f"alpha = {alpha} is not above the admissibility threshold {threshold}")

    M = maximal_uncentred(space, f, kappa * R)
    U = np.flatnonzero(M > alpha)
    halo = neighborhood(space, E, R / 2)
    if U.size == space.n:
        raise RuntimeError("implementation bug: bad set is the whole space")
    v = f.values
    w = space.weight
    if U.size == 0:
        return CZDecomposition(f, float(alpha), float(kappa), float(R), tuple(E.tolist()), (), (), (), (),
                               (), f, (), D, tuple(halo.tolist()))

    cover = whitney_cover(space, U, 2 * R)
    counts = ball_counts(space, cover.centers, cover.radii)
    if np.any(counts[U] == 0):
        raise RuntimeError("implementation bug: Whitney balls miss part of the bad set")

    inU = np.zeros(space.n, dtype=bool)
    inU[U] = True
    g = np.where(inU[:, None], 0.0, v)
    members, etas, hs = [], [], []
    for x, r in zip(cover.centers, cover.radii):
        B = np.flatnonzero(space.dist[x] < r)
        eta = 1.0 / counts[B]
        feta = v[B] * eta[:, None]
        avg = (feta * w[B][:, None]).sum(axis=0) / w[B].sum()
        h = np.zeros_like(v)
        h[B] = feta - avg[None, :]
        g[B] += avg[None, :]
        members.append(B)
        etas.append(eta)
        hs.append(FunctionOnSpace(h, f.vec_norm))
    return CZDecomposition(
        f, float(alpha), float(kappa), float(R), tuple(E.tolist()), tuple(U.tolist()),
        cover.centers, cover.radii, tuple(members), tuple(etas),
        FunctionOnSpace(g, f.vec_norm), tuple(hs), D, tuple(halo.tolist()),
    )


def _fail_if(report: BoundReport, ok: bool, **details) -> BoundReport:
    report.details.update(details)
    if not ok:
        report.passed = False
    return report


def certify_czd(space: MetricMeasureSpace, dec: CZDecomposition) -> list[BoundReport]:
    """The seven conclusions of the decomposition, one report each."""
    f, g, D, alpha = dec.f, dec.g, dec.D, dec.alpha
    w = space.weight
    inhalo = np.zeros(space.n, dtype=bool)
    inhalo[list(dec.halo)] = True
    f1 = f.lp_norm(space, 1)
    finf = f.lp_norm(space, np.inf)

    total_h = np.zeros_like(f.values)
    for h in dec.h:
        total_h += h.values
    residual = float(np.abs(f.values - g.values - total_h).max())
    r1 = BoundReport.inequality("czd.1.reconstruction", RESIDUAL_TOL, residual, 1.0 + finf)

    g_out = np.flatnonzero(np.any(g.values != 0, axis=1) & ~inhalo)
    r2 = BoundReport.inequality("czd.2.g_sup", D**2, g.lp_norm(space, np.inf), alpha)
    r2 = _fail_if(r2, g_out.size == 0, support_ok=bool(g_out.size == 0))

    r3 = BoundReport.inequality("czd.3.g_l1", 3.0, g.lp_norm(space, 1), f1)

    support_ok = True
    for x, r, h in zip(dec.centers, dec.radii, dec.h):
        ball = space.dist[x] < r
        nz = np.any(h.values != 0, axis=1)
        if np.any(nz & ~ball) or np.any(ball & ~inhalo):
            support_ok = False
    ball_mass = sum(float(w[B].sum()) for B in dec.ball_members)
    r4 = BoundReport.inequality("czd.4.ball_mass", D**6, ball_mass, f1 / alpha if alpha else np.inf)
    r4 = _fail_if(r4, support_ok, support_ok=support_ok)

    worst5, lhs5, rhs5 = 0.0, 0.0, 0.0
    for h in dec.h:
        mean = np.abs(w @ h.values).max()
        l1 = h.lp_norm(space, 1)
        ratio = 0.0 if mean == 0 else (np.inf if l1 == 0 else mean / l1)
        if ratio > worst5:
            worst5, lhs5, rhs5 = ratio, float(mean), l1
    r5 = BoundReport.inequality("czd.5.mean_zero", RESIDUAL_TOL, lhs5, rhs5 if lhs5 else 1.0)

    hinf = max((h.lp_norm(space, np.inf) for h in dec.h), default=0.0)
    h1 = sum(h.lp_norm(space, 1) for h in dec.h)
    sup6 = BoundReport.inequality("czd.6.h_sup", 2.0, hinf, finf)
    l16 = BoundReport.inequality("czd.6.h_l1", 2.0, h1, f1)
    r6 = sup6 if sup6.ratio >= l16.ratio else l16
    r6 = BoundReport(
        "czd.6.h_bounds", r6.claimed_constant, r6.measured_lhs, r6.measured_rhs, r6.ratio,
        sup6.passed and l16.passed, None, {"sup_ratio": sup6.ratio, "l1_ratio": l16.ratio},
    )

    counts = ball_counts(space, dec.centers, dec.radii)
    top = int(np.argmax(counts))
    r7 = BoundReport.inequality("czd.7.overlap", D**5, float(counts[top]), 1.0, witness=top)
    return [r1, r2, r3, r4, r5, r6, r7]

