"""Slow, independent reference implementations used to validate the package.

Nothing here imports the code under test beyond the space container, and
every routine is written as the most literal loop over the definition.
"""
from __future__ import annotations

import math

import numpy as np


def doubling_grid(dist, weight, R, start=2000, max_points=64000):
    """``sup mu(B(x, 2r)) / mu(B(x, r))`` over a dense radius grid on ``(0, R]``.

    The grid doubles until two consecutive refinements agree.
    """
    dist = np.asarray(dist)
    weight = np.asarray(weight)
    prev = None
    k = start
    while k <= max_points:
        rs = np.append(np.linspace(0.0, R, k + 1)[1:], R)
        best = 1.0
        for r in rs:
            small = (dist < r) @ weight
            big = (dist < 2 * r) @ weight
            best = max(best, float((big / small).max()))
        if prev is not None and best == prev:
            return best
        prev = best
        k *= 2
    return prev


def ball_average(dist, weight, absf, y, r):
    s = m = 0.0
    for z in range(len(weight)):
        if dist[y][z] < r:
            s += absf[z] * weight[z]
            m += weight[z]
    return s / m


def _radii(drow, R):
    # every distinct open ball B(y, r), 0 < r <= R, is realised just above a distance or at R
    out = {R}
    for d in drow:
        if d < R:
            out.add(float(np.nextafter(d, np.inf)))
    return sorted(out)


def maximal_brute(dist, weight, absf, R, centred):
    n = len(weight)
    out = [0.0] * n
    for y in range(n):
        for r in _radii(dist[y], R):
            avg = ball_average(dist, weight, absf, y, r)
            for x in range(n):
                if (x == y if centred else dist[y][x] < r) and avg > out[x]:
                    out[x] = avg
    return np.array(out)


def maximal_grid(dist, weight, absf, R, centred, points=400):
    """Same supremum over a uniform radius grid; never exceeds :func:`maximal_brute`."""
    n = len(weight)
    out = np.zeros(n)
    for r in np.linspace(0.0, R, points + 1)[1:]:
        inside = dist < r
        avg = (inside @ (absf * weight)) / (inside @ weight)
        if centred:
            out = np.maximum(out, avg)
        else:
            out = np.maximum(out, np.where(inside, avg[:, None], 0.0).max(axis=0))
    return out


def hormander_brute(K, dist, weight, E, halo, R):
    best = 0.0
    for y in halo:
        for y2 in halo:
            dyy = dist[y][y2]
            if not (0.0 < dyy < R):
                continue
            s = 0.0
            for x in E:
                if dist[x][y] >= 2.0 * dyy:
                    s += abs(K[x][y] - K[x][y2]) * weight[x]
            best = max(best, s)
    return best


def spectral_norm_power(M, tol=1e-12, max_iter=200000, seed=0):
    """Largest singular value by power iteration on ``M^T M``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        u = M.T @ (M @ v)
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        u /= nu
        new = math.sqrt(nu)
        if abs(new - sigma) <= tol * new and np.linalg.norm(u - v) <= 1e-8:
            return new
        sigma, v = new, u
    return sigma


def mixed_norm_loops(values, weights, exponents):
    """Iterated norm with explicit nested loops, innermost axis first."""
    values = np.asarray(values, dtype=np.float64)

    def rec(idx, level):
        # norm over axes 0..level with the outer indices fixed to idx
        p = exponents[level]
        total = 0.0
        for i in range(values.shape[level]):
            if level == 0:
                inner = abs(float(values[(i,) + idx]))
            else:
                inner = rec((i,) + idx, level - 1)
            total += weights[level][i] * inner**p
        return total ** (1.0 / p)

    return rec((), values.ndim - 1)


def phi_objective(q, r, p):
    qc = q / (q - 1.0)
    return (qc + 1.0 / (r / q - 1.0)) ** ((1.0 / p - 1.0 / r) / (1.0 - q / r))


def phi_grid(r, p, points=100001):
    """Dense scan of ``q`` on ``[1 + 1e-8, p]`` followed by a finer scan of the best cell."""
    if math.isinf(r):
        return (p / (p - 1.0)) ** (1.0 / p)
    if p == r:
        return 1.0
    if p > r:
        r, p = r / (r - 1.0), p / (p - 1.0)
    q = np.linspace(1.0 + 1e-8, p, points)
    vals = phi_objective(q, r, p)
    k = int(np.argmin(vals))
    lo, hi = q[max(k - 1, 0)], q[min(k + 1, points - 1)]
    fine = np.linspace(lo, hi, 20001)
    return float(min(vals[k], phi_objective(fine, r, p).min()))
