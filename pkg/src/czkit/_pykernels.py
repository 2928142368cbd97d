"""Pure-Python (numpy) twins of the compiled kernels in ``_core.pyx``.

Signatures, results and floating-point operation order match the compiled
versions: prefix sums are sequential (``np.cumsum``) and reductions over
rows accumulate one row at a time.
"""
from __future__ import annotations

import numpy as np


def triangle_violation(dist):
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    first_j = np.full((n, n), n, dtype=np.int64)
    for j in range(n):
        viol = dist > dist[:, j : j + 1] + dist[j : j + 1, :]
        np.copyto(first_j, j, where=viol & (first_j == n))
    upper = np.triu(first_j < n, k=1)
    if not upper.any():
        return None
    flat = int(np.flatnonzero(upper)[0])
    i, k = divmod(flat, n)
    return i, k, int(first_j[i, k])


def doubling_pairs(sorted_d, cumw):
    n = sorted_d.shape[0]
    a_parts = []
    v_parts = []
    for x in range(n):
        row = sorted_d[x]
        pos = row[1:]
        if pos.size == 0:
            continue
        cand = np.unique(np.concatenate([pos, 0.5 * pos]))
        lo = np.searchsorted(row, cand, side="left")
        hi = np.searchsorted(row, 2.0 * cand, side="left")
        a_parts.append(np.concatenate([[0.0], cand[:-1]]))
        v_parts.append(cumw[x, hi - 1] / cumw[x, lo - 1])
    if not a_parts:
        return np.empty(0), np.empty(0)
    return np.concatenate(a_parts), np.concatenate(v_parts)


def maximal_sweep(order, sorted_d, cumw, weight, vals, R, centred):
    n = order.shape[0]
    m = vals.shape[1]
    group_end = np.ones((n, n), dtype=bool)
    group_end[:, :-1] = sorted_d[:, :-1] < sorted_d[:, 1:]
    valid = group_end & (sorted_d < R)
    out = np.zeros((n, m))
    # chunk the centre axis to bound the n x n x m temporary
    step = max(1, 4_000_000 // max(1, n * m))
    for y0 in range(0, n, step):
        ys = slice(y0, min(n, y0 + step))
        o = order[ys]
        acc = np.cumsum(vals[o] * weight[o][..., None], axis=1)
        avg = np.where(valid[ys][..., None], acc / cumw[ys][..., None], -np.inf)
        if centred:
            out[ys] = avg.max(axis=1)
        else:
            suf = np.maximum.accumulate(avg[:, ::-1, :], axis=1)[:, ::-1, :]
            rank = np.argsort(o, axis=1)
            at_point = np.take_along_axis(suf, rank[..., None], axis=1)
            np.maximum(out, at_point.max(axis=0), out=out)
    return out


def gram_sequential(u):
    n, k = u.shape
    out = np.zeros((n, n))
    for z in range(k):
        col = u[:, z]
        if not col.any():
            continue
        out += np.multiply.outer(col, col)
    return out


def hormander_scan(K, dist, weight, rows, cols, R):
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    Kr = K[rows]
    dr = dist[rows]
    wr = weight[rows][:, None]
    best, by, by2, found = 0.0, -1, -1, False
    for y in cols:
        dyy = dist[y, cols]
        ok = (dyy > 0.0) & (dyy < R)
        if not ok.any():
            continue
        c2 = cols[ok]
        thr = 2.0 * dyy[ok]
        terms = np.abs(Kr[:, y : y + 1] - Kr[:, c2]) * wr
        terms[dr[:, y : y + 1] < thr[None, :]] = 0.0
        sums = np.zeros(c2.size)
        for t in range(terms.shape[0]):
            sums += terms[t]
        j = int(np.argmax(sums))
        if not found or sums[j] > best:
            best, by, by2, found = float(sums[j]), int(y), int(c2[j]), True
    return best, by, by2
