"""Smooth normalised kernels ``S_r`` and the averaging operators ``T_r``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .functions import FunctionOnSpace, as_function
from .reports import BoundReport
from .space import MetricMeasureSpace, ball_measures, doubling_constant

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BumpProfile:
    """``h = 1`` on ``[0, 1]``, a cubic smoothstep down to ``0`` at ``eta``, then ``0``."""

    eta: float = 7.0 / 6.0

    def __post_init__(self):
        if not 1 < self.eta <= 7.0 / 6.0:
            raise ValueError(f"eta must lie in (1, 7/6], got {self.eta}")

    @property
    def lipschitz_bound(self) -> float:
        return 3.0 / (2.0 * (self.eta - 1.0))

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        s = np.clip((t - 1.0) / (self.eta - 1.0), 0.0, 1.0)
        return 1.0 - s * s * (3.0 - 2.0 * s)


@dataclass(frozen=True, eq=False)
class SmoothKernel:
    r: float
    R: float
    S: np.ndarray
    V_r: np.ndarray
    T1: np.ndarray
    D4R: float
    eta: float
    identity: bool
    empirical_C6: float = math.nan


def _profile_matrix(space: MetricMeasureSpace, profile: BumpProfile, r: float) -> np.ndarray:
    return profile(space.dist / r)


def t_r_apply(space: MetricMeasureSpace, profile: BumpProfile, r: float, f) -> FunctionOnSpace:
    """``(T_r f)(x) = sum_y h(d(x, y) / r) f(y) w(y)``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    f = as_function(f, space.n)
    H = _profile_matrix(space, profile, r)
    return FunctionOnSpace(H @ (f.values * space.weight[:, None]), f.vec_norm)


def build_kernel(space: MetricMeasureSpace, profile: BumpProfile | None, r: float, R: float,
                 with_c6: bool = True) -> SmoothKernel:
    """``S_r`` as a dense ``n x n`` matrix.

    ``S_r(x, y) = sum_z h_xz h_zy w(z) / W(z) / (T1(x) T1(y))`` with
    ``T1 = T_r 1`` and ``W = T_r(1 / T1)``.  The ``z``-sum is evaluated as a
    Gram product of ``u = H diag(sqrt(w / W)) / T1`` accumulated one ``z``
    at a time, which makes ``S`` exactly symmetric.  When ``eta r`` does not
    exceed the smallest distance, ``S`` is ``diag(1 / w)``.
    """
    profile = profile or BumpProfile()
    if not 0 < r <= R:
        raise ValueError(f"need 0 < r <= R, got r={r}, R={R}")
    w = space.weight
    D = doubling_constant(space, 4 * R)
    V = ball_measures(space, r)
    if profile.eta * r <= space.min_distance:
        S = np.diag(1.0 / w)
        T1 = w.copy()
        identity = True
    else:
        H = _profile_matrix(space, profile, r)
        T1 = H @ w
        W = H @ (w / T1)
        u = np.ascontiguousarray(H * np.sqrt(w / W)[None, :] / T1[:, None])
        S = kernels.gram_sequential(u)
        identity = False
    S.setflags(write=False)
    c6 = lipschitz_constant(space, S, V, r, D) if with_c6 else math.nan
    return SmoothKernel(float(r), float(R), S, V, T1, D, profile.eta, identity, c6)


def lipschitz_constant(space: MetricMeasureSpace, S: np.ndarray, V: np.ndarray, r: float, D: float) -> float:
    """``sup |S(x,y) - S(x',y)| r (min(V(x), V(x')) + V(y)) / (D^8 d(x, x'))`` over ``x != x'``."""
    n = space.n
    best = 0.0
    for x in range(n):
        d = space.dist[x]
        others = d > 0
        if not others.any():
            continue
        diff = np.abs(S[x][None, :] - S[others])
        scale = (np.minimum(V[x], V[others])[:, None] + V[None, :]) * r
        val = diff * scale / (D**8 * d[others][:, None])
        best = max(best, float(val.max()))
    return best


def kernel_family(space: MetricMeasureSpace, profile: BumpProfile | None, R_prime: float,
                  j_max: int | None = None, with_c6: bool = False) -> list[SmoothKernel]:
    """Kernels at scales ``2^-j R'`` for ``j = 0..j_max``, all built with ``R = R'``.

    By default ``j_max`` is the first ``j`` with ``eta 2^-j R'`` at most the
    smallest distance; from there on every kernel is ``diag(1 / w)``.
    """
    profile = profile or BumpProfile()
    if not R_prime > 0:
        raise ValueError(f"R' must be positive, got {R_prime}")
    if j_max is None:
        j_max = 0
        while profile.eta * R_prime * 2.0**-j_max > space.min_distance:
            j_max += 1
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    return [build_kernel(space, profile, R_prime * 2.0**-j, R_prime, with_c6) for j in range(j_max + 1)]


def certify_kernel(space: MetricMeasureSpace, K: SmoothKernel) -> list[BoundReport]:
    """Properties (1)-(5), positivity, the ``T_r 1`` sandwich and the reported constant (6)."""
    S, V, D, r = K.S, K.V_r, K.D4R, K.r
    d = space.dist
    w = space.weight
    reps = []

    far = d >= 2 * K.eta * r
    leak = float(np.abs(S[far]).max()) if far.any() else 0.0
    reps.append(BoundReport.condition("kernel.1.support", leak == 0.0, support_radius=2 * K.eta * r,
                                      stated_radius=3 * r))
    asym = np.argwhere(S != S.T)
    reps.append(BoundReport.condition("kernel.2.symmetry", asym.size == 0,
                                      witness=tuple(map(int, asym[0])) if asym.size else None))
    dev = np.abs(S @ w - 1.0)
    x = int(np.argmax(dev))
    reps.append(BoundReport.inequality("kernel.3.row_sums", ROW_SUM_TOL, dev[x], 1.0, witness=x))

    near = d < r / 2
    minV = np.minimum(V[:, None], V[None, :])
    lower = 1.0 / (D**5 * minV)
    with np.errstate(divide="ignore"):
        q4 = np.where(near, lower / S, 0.0)
    i, j = np.unravel_index(int(np.argmax(q4)), q4.shape)
    reps.append(BoundReport.inequality("kernel.4.lower", 1.0, lower[i, j], S[i, j], witness=(int(i), int(j))))

    lhs5 = S * (V[:, None] + V[None, :])
    i, j = np.unravel_index(int(np.argmax(lhs5)), lhs5.shape)
    reps.append(BoundReport.inequality("kernel.5.upper", 2 * D**2, lhs5[i, j], 1.0, witness=(int(i), int(j))))

    neg = np.argwhere(S < 0)
    reps.append(BoundReport.condition("kernel.positivity", neg.size == 0,
                                      witness=tuple(map(int, neg[0])) if neg.size else None))

    # V_r <= T_r 1 <= V_{eta r}; the sums are taken in different orders
    Veta = ball_measures(space, K.eta * r)
    with np.errstate(divide="ignore"):
        q = np.maximum(V / K.T1, K.T1 / Veta)
    x = int(np.argmax(q))
    if V[x] / K.T1[x] >= K.T1[x] / Veta[x]:
        reps.append(BoundReport.inequality("kernel.sandwich", 1.0, V[x], K.T1[x], witness=x, side="lower"))
    else:
        reps.append(BoundReport.inequality("kernel.sandwich", 1.0, K.T1[x], Veta[x], witness=x, side="upper"))

    c6 = K.empirical_C6
    if math.isnan(c6):
        c6 = lipschitz_constant(space, S, V, r, D)
    reps.append(BoundReport.condition("kernel.6.lipschitz_reported", math.isfinite(c6), empirical_C=c6))
    return reps


def check_majorization(space: MetricMeasureSpace, family: list[SmoothKernel], f) -> BoundReport:
    """``avg_{B(x, r_j / 2)} |f| <= D^6 (S_{r_j} |f|)(x)`` for every scale and point.

    ``D`` is the ``D_{4R}`` of the family, so the maximal function at radius
    ``R'/2`` is dominated by ``D^7`` times the supremum over scales.
    """
    f = as_function(f, space.n)
    absf = f.abs()
    w = space.weight
    worst = BoundReport.inequality("kernel.majorization", 1.0, 0.0, 1.0)
    for K in family:
        smooth = K.S @ (absf * w)
        half = space.dist < K.r / 2
        avg = (half * (absf * w)[None, :]).sum(axis=1) / (half * w[None, :]).sum(axis=1)
        bound = K.D4R**6 * smooth
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(avg == 0, 0.0, avg / bound)
        x = int(np.argmax(ratio))
        rep = BoundReport.inequality("kernel.majorization", K.D4R**6, avg[x], smooth[x], witness=(K.r, x))
        if (not rep.passed, rep.ratio) > (not worst.passed, worst.ratio):
            worst = rep
    return worst
