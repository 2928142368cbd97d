# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.

Every function here has a pure-Python twin in ``_pykernels`` with the same
signature and the same floating-point operation order, so both backends
return identical results on the same input.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def triangle_violation(const double[:, ::1] dist):
    """First ``(i, k, j)`` with ``i < k`` and ``dist[i, k] > dist[i, j] + dist[j, k]``.

    Triples are scanned with ``(i, k)`` in row-major order and ``j``
    ascending. Returns ``None`` when the triangle inequality holds.
    """
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t fi = -1, fk = -1, fj = -1
    with nogil:
        for i in range(n):
            for k in range(i + 1, n):
                for j in range(n):
                    if dist[i, k] > dist[i, j] + dist[j, k]:
                        fi = i
                        fk = k
                        fj = j
                        break
                if fi >= 0:
                    break
            if fi >= 0:
                break
    if fi < 0:
        return None
    return int(fi), int(fk), int(fj)


def doubling_pairs(const double[:, ::1] sorted_d, const double[:, ::1] cumw):
    """Left endpoints and doubling ratios of every per-point constancy interval.

    For each point ``x`` the candidate radii are ``{d, d/2}`` over the positive
    distances from ``x``.  On the interval ``(c_{k-1}, c_k]`` the ratio
    ``mu(B(x, 2r)) / mu(B(x, r))`` equals its value at ``c_k``; the pair
    ``(c_{k-1}, ratio)`` is emitted with ``c_{-1} = 0``.
    """
    cdef Py_ssize_t n = sorted_d.shape[0]
    cdef Py_ssize_t cap = n * (2 * n) + 1
    out_a_arr = np.empty(cap, dtype=np.float64)
    out_v_arr = np.empty(cap, dtype=np.float64)
    cdef double[::1] out_a = out_a_arr
    cdef double[::1] out_v = out_v_arr
    cdef Py_ssize_t x, ia, ib, lo, hi, cnt = 0
    cdef double c, prev, ca, cb, two_c
    with nogil:
        for x in range(n):
            # merge sorted_d[x, 1:] and 0.5 * sorted_d[x, 1:]
            ia = 1
            ib = 1
            lo = 0
            hi = 0
            prev = 0.0
            while ia < n or ib < n:
                ca = sorted_d[x, ia] if ia < n else INFINITY
                cb = 0.5 * sorted_d[x, ib] if ib < n else INFINITY
                if cb < ca:
                    c = cb
                else:
                    c = ca
                while ia < n and sorted_d[x, ia] == c:
                    ia += 1
                while ib < n and 0.5 * sorted_d[x, ib] == c:
                    ib += 1
                two_c = 2.0 * c
                while lo < n and sorted_d[x, lo] < c:
                    lo += 1
                while hi < n and sorted_d[x, hi] < two_c:
                    hi += 1
                out_a[cnt] = prev
                out_v[cnt] = cumw[x, hi - 1] / cumw[x, lo - 1]
                cnt += 1
                prev = c
    return out_a_arr[:cnt].copy(), out_v_arr[:cnt].copy()


def maximal_sweep(const cnp.int64_t[:, ::1] order,
                  const double[:, ::1] sorted_d,
                  const double[:, ::1] cumw,
                  const double[::1] weight,
                  const double[:, ::1] vals,
                  double R,
                  bint centred):
    """Truncated maximal averages of nonnegative columns.

    ``vals`` has one column per independent nonnegative function.  For each
    centre ``y`` the distinct open balls ``B(y, r)``, ``0 < r <= R`` are the
    prefixes of the distance-sorted row ending at a tie-group end ``i`` with
    ``sorted_d[y, i] < R``.  Centred: maximum prefix average at ``y``.
    Uncentred: every point takes the best prefix that contains it, over all
    centres.
    """
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t m = vals.shape[1]
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    acc_arr = np.zeros(m, dtype=np.float64)
    avg_arr = np.empty((n, m), dtype=np.float64)
    cdef double[::1] acc = acc_arr
    cdef double[:, ::1] avg = avg_arr
    cdef Py_ssize_t y, i, c, p
    cdef double best, a
    cdef bint valid
    with nogil:
        for y in range(n):
            for c in range(m):
                acc[c] = 0.0
            for i in range(n):
                p = order[y, i]
                valid = (i == n - 1 or sorted_d[y, i] < sorted_d[y, i + 1]) and sorted_d[y, i] < R
                for c in range(m):
                    acc[c] = acc[c] + vals[p, c] * weight[p]
                    if valid:
                        avg[i, c] = acc[c] / cumw[y, i]
                    else:
                        avg[i, c] = -INFINITY
            if centred:
                for c in range(m):
                    best = -INFINITY
                    for i in range(n):
                        if avg[i, c] > best:
                            best = avg[i, c]
                    out[y, c] = best
            else:
                for c in range(m):
                    best = -INFINITY
                    i = n - 1
                    while i >= 0:
                        a = avg[i, c]
                        if a > best:
                            best = a
                        p = order[y, i]
                        if best > out[p, c]:
                            out[p, c] = best
                        i -= 1
    return out_arr


def gram_sequential(const double[:, ::1] u):
    """``S[x, y] = sum_z u[x, z] * u[y, z]``, summed in ascending ``z``.

    Only the upper triangle is computed; the result is exactly symmetric.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k = u.shape[1]
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t x, y, z
    cdef double s
    with nogil:
        for x in range(n):
            for y in range(x, n):
                s = 0.0
                for z in range(k):
                    s = s + u[x, z] * u[y, z]
                out[x, y] = s
                out[y, x] = s
    return out_arr


def hormander_scan(const double[:, ::1] K,
                   const double[:, ::1] dist,
                   const double[::1] weight,
                   const cnp.int64_t[::1] rows,
                   const cnp.int64_t[::1] cols,
                   double R):
    """Largest Hormander sum over column pairs.

    For ``y, y'`` in ``cols`` with ``0 < d(y, y') < R`` the sum is
    ``sum_{x in rows, d(x, y) >= 2 d(y, y')} |K[x, y] - K[x, y']| w(x)``,
    accumulated in the order of ``rows``.  Returns ``(best, y, y')`` with
    the first pair attaining the maximum, or ``(0.0, -1, -1)`` when no pair
    qualifies.
    """
    cdef Py_ssize_t nr = rows.shape[0]
    cdef Py_ssize_t nc = cols.shape[0]
    cdef Py_ssize_t a, b, t, x, y, y2
    cdef Py_ssize_t by = -1, by2 = -1
    cdef double best = 0.0, s, dyy, thr
    cdef bint found = False
    with nogil:
        for a in range(nc):
            y = cols[a]
            for b in range(nc):
                y2 = cols[b]
                dyy = dist[y, y2]
                if not (dyy > 0.0 and dyy < R):
                    continue
                thr = 2.0 * dyy
                s = 0.0
                for t in range(nr):
                    x = rows[t]
                    if dist[x, y] >= thr:
                        s = s + fabs(K[x, y] - K[x, y2]) * weight[x]
                if not found or s > best:
                    best = s
                    by = y
                    by2 = y2
                    found = True
    return best, int(by), int(by2)
