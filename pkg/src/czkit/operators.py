"""Kernel-operator constants and the bound checks for localised and patched operators.

A scalar kernel ``K`` acts on vector-valued ``f`` coordinatewise:
``(T f)(x) = sum_y K(x, y) f(y) w(y)``.  For a set ``E`` with
``diam(E) < R`` the localised operator maps functions on the halo
``B(E, R/2)`` to functions on ``E``; the dual arrangement maps functions on
``E`` to functions on the halo.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .interp import INF, phi
from .functions import _parse_exponent
from .reports import BoundReport
from .space import (
    MetricMeasureSpace,
    ball_measures,
    doubling_constant,
    neighborhood,
    separated_net,
    set_diameter,
)

DEFAULT_TRIALS = 200
DEFAULT_SEED = 20240607
MAX_DIPOLES = 64


@dataclass(frozen=True)
class LocalConstants:
    """``A_R`` and ``C_R`` for one set ``E`` in one orientation."""

    A: float
    C: float
    witness: tuple[int, int]
    dual: bool


def _as_kernel(space: MetricMeasureSpace, K) -> np.ndarray:
    K = np.ascontiguousarray(K, dtype=np.float64)
    if K.shape != (space.n, space.n):
        raise ValueError(f"kernel must be {space.n} x {space.n}, got {K.shape}")
    if not np.all(np.isfinite(K)):
        raise ValueError("kernel entries must be finite")
    return K


def _local_sets(space: MetricMeasureSpace, E, R: float) -> tuple[np.ndarray, np.ndarray]:
    E = np.unique(np.asarray(E, dtype=np.int64))
    if E.size == 0:
        raise ValueError("E must be nonempty")
    diam = set_diameter(space, E)
    if not diam < R:
        raise ValueError(f"diam(E) = {diam} is not below R = {R}")
    return E, neighborhood(space, E, R / 2)


def hormander_constant(space: MetricMeasureSpace, K, E, R: float, transpose: bool = False) -> tuple[float, int, int]:
    """Exact Hörmander constant of ``K`` on ``E``.

    The maximum over ``y, y'`` in ``B(E, R/2)`` with ``0 < d(y, y') < R`` of
    ``sum_{x in E, d(x, y) >= 2 d(y, y')} |K(x, y) - K(x, y')| w(x)``.
    With ``transpose`` the roles of the two arguments swap, giving the dual
    condition.  Returns ``(C, y, y')``; ``(0.0, -1, -1)`` if no pair qualifies.
    """
    K = _as_kernel(space, K)
    E, halo = _local_sets(space, E, R)
    M = np.ascontiguousarray(K.T) if transpose else K
    return kernels.hormander_scan(M, space.dist, space.weight, E, halo, float(R))


def weighted_norm(K_block: np.ndarray, w_out: np.ndarray, w_in: np.ndarray, r) -> float:
    """Upper bound for ``||f -> K_block (f w_in)||`` on ``L^r(w_in) -> L^r(w_out)``.

    Exact for ``r = 1, 2, inf``; Riesz-Thorin between ``1`` and ``inf`` otherwise.
    """
    r = _parse_exponent(r)
    if K_block.size == 0:
        return 0.0
    A = np.abs(K_block)
    norm_inf = float((A @ w_in).max())
    norm_1 = float((w_out @ A).max())
    if r == INF:
        return norm_inf
    if r == 1:
        return norm_1
    if r == 2:
        M = np.sqrt(w_out)[:, None] * K_block * np.sqrt(w_in)[None, :]
        return float(np.linalg.svd(M, compute_uv=False)[0])
    return norm_1 ** (1.0 / r) * norm_inf ** (1.0 - 1.0 / r)


def operator_norm_bound(space: MetricMeasureSpace, K, E, R: float, r_exp, transpose: bool = False) -> float:
    """Certified ``A_R``: the ``L^r`` norm of ``K[E, halo]`` (or ``K[halo, E]`` with ``transpose``)."""
    K = _as_kernel(space, K)
    E, halo = _local_sets(space, E, R)
    w = space.weight
    if transpose:
        return weighted_norm(K[np.ix_(halo, E)], w[halo], w[E], r_exp)
    return weighted_norm(K[np.ix_(E, halo)], w[E], w[halo], r_exp)


def local_constants(space: MetricMeasureSpace, K, E, R: float, r_exp, dual: bool = False,
                    A_override: float | None = None) -> LocalConstants:
    A = operator_norm_bound(space, K, E, R, r_exp, transpose=dual) if A_override is None else float(A_override)
    C, y, y2 = hormander_constant(space, K, E, R, transpose=dual)
    return LocalConstants(A, C, (int(y), int(y2)), dual)


def czo_constant(p: float, r_exp: float, D: float, A: float, C: float) -> float:
    """``16 phi(r, p) (D^9 A + C)``."""
    return 16.0 * phi(r_exp, p) * (D**9 * A + C)


def probe_functions(space: MetricMeasureSpace, support, trials: int, seed: int) -> tuple[np.ndarray, list[str]]:
    """Columns of random, spike and mean-zero dipole functions supported on ``support``.

    Random columns are Gaussian, half of them multiplied by a random sparse
    mask; spikes are point masses at every support point; dipoles are
    ``e_y - (w(y) / w(y')) e_y'`` for pairs spread over all separations.
    """
    support = np.asarray(support, dtype=np.int64)
    n, s = space.n, support.size
    rng = np.random.default_rng(seed)
    cols, labels = [], []
    for t in range(trials):
        v = np.zeros(n)
        vals = rng.standard_normal(s)
        if t % 2:
            vals *= rng.random(s) < max(2.0 / s, rng.random())
        v[support] = vals
        cols.append(v)
        labels.append(f"random:{t}")
    for y in support:
        v = np.zeros(n)
        v[y] = 1.0
        cols.append(v)
        labels.append(f"spike:{int(y)}")
    if s > 1:
        d = space.dist[np.ix_(support, support)]
        iu = np.triu_indices(s, k=1)
        order = np.argsort(d[iu], kind="stable")
        pick = order[np.unique(np.linspace(0, order.size - 1, min(MAX_DIPOLES, order.size)).astype(int))]
        for k in pick:
            a, b = int(support[iu[0][k]]), int(support[iu[1][k]])
            v = np.zeros(n)
            v[a] = 1.0
            v[b] = -space.weight[a] / space.weight[b]
            cols.append(v)
            labels.append(f"dipole:{a}-{b}")
    return np.column_stack(cols), labels


def _worst_ratio(TF: np.ndarray, w_out: np.ndarray, F: np.ndarray, w_in: np.ndarray, p: float):
    """Column with the largest ``||TF||_p / ||F||_p``."""
    if p == INF:
        num = np.abs(TF).max(axis=0) if TF.size else np.zeros(F.shape[1])
        den = np.abs(F).max(axis=0)
    else:
        num = (np.abs(TF) ** p * w_out[:, None]).sum(axis=0) ** (1.0 / p)
        den = (np.abs(F) ** p * w_in[:, None]).sum(axis=0) ** (1.0 / p)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(num == 0, 0.0, num / den)
    k = int(np.argmax(ratio))
    return k, float(num[k]), float(den[k])


def check_czo_bound(space: MetricMeasureSpace, K, E, R: float, kappa: float = 2.5, r_exp=INF,
                    p_list=(1.5, 2.0, 4.0), trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
                    A_override: float | None = None) -> list[BoundReport]:
    """``||chi_E T f||_p <= 16 phi(r, p) (D_{3 kappa R}^9 A_R + C_R) ||f||_p`` for ``f`` on ``E``.

    Exponents ``p <= r`` use the constants of ``K[E, halo]``; exponents
    ``p > r`` use the dual constants of ``K[halo, E]``.
    """
    K = _as_kernel(space, K)
    r_exp = _parse_exponent(r_exp)
    if not kappa > 2:
        raise ValueError(f"kappa must exceed 2, got {kappa}")
    if not r_exp > 1:
        raise ValueError(f"r must exceed 1, got {r_exp}")
    E, _ = _local_sets(space, E, R)
    D = doubling_constant(space, 3 * kappa * R)
    w = space.weight
    F, labels = probe_functions(space, E, trials, seed)
    FE = F[E]
    TF = K[np.ix_(E, E)] @ (FE * w[E][:, None])
    consts: dict[bool, LocalConstants] = {}
    reports = []
    for p in p_list:
        p = _parse_exponent(p)
        if not 1 < p < INF:
            raise ValueError(f"p must lie in (1, inf), got {p}")
        dual = p > r_exp
        if dual not in consts:
            consts[dual] = local_constants(space, K, E, R, r_exp, dual, A_override)
        lc = consts[dual]
        k, num, den = _worst_ratio(TF, w[E], FE, w[E], p)
        reports.append(BoundReport.inequality(
            f"czo.{'dual' if dual else 'local'}[p={p:g}]", czo_constant(p, r_exp, D, lc.A, lc.C), num, den,
            witness=labels[k], p=p, A_R=lc.A, C_R=lc.C, D=D, r=r_exp, functions=len(labels),
            hormander_pair=list(lc.witness),
        ))
    return reports


def truncate_kernel(space: MetricMeasureSpace, K, radius: float) -> np.ndarray:
    """``K`` with entries at distance ``> radius`` set to zero."""
    K = _as_kernel(space, K)
    return np.where(space.dist <= radius, K, 0.0)


def check_patched_bound(space: MetricMeasureSpace, K, R: float, kappa: float = 2.5, r_exp=INF,
                        p_list=(1.5, 2.0, 4.0), trials: int = DEFAULT_TRIALS,
                        seed: int = DEFAULT_SEED) -> list[BoundReport]:
    """Global ``||T f||_p <= 16 phi(r, p) D_R^{5/p} (D_{3 kappa R}^9 A_R + C_R) ||f||_p``.

    ``A_R`` and ``C_R`` are the largest local constants over the patches
    ``B(x_j, 11 R / 24)`` around a maximal ``R/8``-separated net.  The kernel
    must vanish at distances above ``R/3``.
    """
    K = _as_kernel(space, K)
    r_exp = _parse_exponent(r_exp)
    if not kappa > 2:
        raise ValueError(f"kappa must exceed 2, got {kappa}")
    wide = np.argwhere((K != 0) & (space.dist > R / 3))
    if wide.size:
        x, y = map(int, wide[0])
        raise ValueError(f"kernel support too wide: K[{x}, {y}] != 0 at distance {space.dist[x, y]} > R/3")
    net = separated_net(space, R / 8)
    patches = [np.flatnonzero(space.dist[x] < R * (1 / 3 + 1 / 8)) for x in net.members]
    DR = doubling_constant(space, R)
    D = doubling_constant(space, 3 * kappa * R)
    w = space.weight

    counts = np.zeros(space.n, dtype=np.int64)
    for x in net.members:
        counts += space.dist[x] < R / 2
    top = int(np.argmax(counts))
    reports = [BoundReport.inequality("patched.overlap", DR**5, float(counts[top]), 1.0, witness=top,
                                      net_size=len(net.members))]

    F, labels = probe_functions(space, np.arange(space.n), trials, seed)
    TF = K @ (F * w[:, None])
    consts: dict[bool, tuple[float, float]] = {}
    for p in p_list:
        p = _parse_exponent(p)
        if not 1 < p < INF:
            raise ValueError(f"p must lie in (1, inf), got {p}")
        dual = p > r_exp
        if dual not in consts:
            A = C = 0.0
            for E in patches:
                lc = local_constants(space, K, E, R, r_exp, dual)
                A, C = max(A, lc.A), max(C, lc.C)
            consts[dual] = (A, C)
        A, C = consts[dual]
        k, num, den = _worst_ratio(TF, w, F, w, p)
        const = DR ** (5.0 / p) * czo_constant(p, r_exp, D, A, C)
        reports.append(BoundReport.inequality(
            f"patched.{'dual' if dual else 'global'}[p={p:g}]", const, num, den, witness=labels[k], p=p,
            A_R=A, C_R=C, D_R=DR, D=D, patches=len(patches), functions=len(labels),
        ))
    return reports


def schur_row_sum_check(space: MetricMeasureSpace, R: float) -> BoundReport:
    """``sup_x mu(B(x, 2R)) / V_{R/126}(x) <= D_R^8``."""
    ratio = ball_measures(space, 2 * R) / ball_measures(space, R / 126)
    x = int(np.argmax(ratio))
    D = doubling_constant(space, R)
    return BoundReport.inequality("mixed.schur_row_sum", D**8, float(ratio[x]), 1.0, witness=x)

