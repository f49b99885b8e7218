# cython: language_level=3
"""Compiled versions of the hot kernels.

This module mirrors ``pure.py`` operation by operation: the same
tie-breaking rules, iteration order, and convergence tests. The extension
is built with multiply-add contraction disabled, so ``closest_pair``,
``lloyd``, and ``lance_williams`` agree with the NumPy backend bit for
bit. ``jacobi_eigh`` accumulates its Frobenius norms in scalar loops
instead of NumPy's pairwise reductions, so its convergence path can
differ from the pure backend by rounding error; the parity tests allow
for that.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt

cnp.import_array()

METHOD_SINGLE = 0
METHOD_COMPLETE = 1
METHOD_AVERAGE = 2
METHOD_WARD = 3


def closest_pair(ex, ey, cx, cy):
    """Frame pair minimizing (distance, |i-j|, i, j) over all (i, j).

    ``ex``/``ey`` are one position series, ``cx``/``cy`` the other.
    Returns ``(i, j, distance)``; ``(-1, -1, inf)`` when either is empty.
    """
    cdef const double[::1] ax = np.ascontiguousarray(ex, dtype=np.float64)
    cdef const double[::1] ay = np.ascontiguousarray(ey, dtype=np.float64)
    cdef const double[::1] bx = np.ascontiguousarray(cx, dtype=np.float64)
    cdef const double[::1] by = np.ascontiguousarray(cy, dtype=np.float64)
    cdef Py_ssize_t n = ax.shape[0]
    cdef Py_ssize_t m = bx.shape[0]
    if n == 0 or m == 0:
        return -1, -1, float("inf")
    cdef double best = INFINITY
    cdef Py_ssize_t bi = -1
    cdef Py_ssize_t bj = -1
    cdef Py_ssize_t bgap = 0
    cdef Py_ssize_t i, j, gap
    cdef double dx, dy, dist
    for i in range(n):
        for j in range(m):
            dx = ax[i] - bx[j]
            dy = ay[i] - by[j]
            dist = sqrt(dx * dx + dy * dy)
            if dist > best:
                continue
            gap = i - j if i >= j else j - i
            if (
                dist < best
                or gap < bgap
                or (gap == bgap and (i < bi or (i == bi and j < bj)))
            ):
                best = dist
                bgap = gap
                bi = i
                bj = j
    return int(bi), int(bj), best


def jacobi_eigh(sym, tol=1e-12, max_sweeps=60):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps the strict upper triangle row by row, rotating every nonzero
    pivot, until the off-diagonal Frobenius mass drops below
    ``tol * ||A||_F``. Returns ``(eigenvalues, eigenvectors)`` unsorted;
    column k of the eigenvector matrix belongs to eigenvalue k.
    """
    a_np = np.array(sym, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = a_np.shape[0]
    v_np = np.eye(n)
    if n == 1:
        return np.array([a_np[0, 0]]), v_np
    cdef double[:, ::1] a = a_np
    cdef double[:, ::1] v = v_np
    cdef double c_tol = tol
    cdef int c_max_sweeps = max_sweeps
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double norm0 = 0.0
    cdef double off, apq, theta, t, c, s, app, aqq, arp, arq, vp, vq
    for p in range(n):
        for q in range(n):
            norm0 += a[p, q] * a[p, q]
    norm0 = sqrt(norm0)
    if norm0 == 0.0:
        return np.zeros(n), v_np
    cdef double thresh = c_tol * norm0
    for sweep in range(c_max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = sqrt(2.0 * off)
        if off <= thresh:
            return np.diagonal(a_np).copy(), v_np
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = 1.0 / (fabs(theta) + sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[p, r] = a[r, p]
                    a[r, q] = s * arp + c * arq
                    a[q, r] = a[r, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    vp = v[r, p]
                    vq = v[r, q]
                    v[r, p] = c * vp - s * vq
                    v[r, q] = s * vp + c * vq
    raise ArithmeticError("jacobi rotation did not converge")


def lloyd(points, centroids, max_iter=300, inertia_trace=None):
    """Lloyd iterations with deterministic ties and empty-cluster repair.

    Assignment ties go to the smallest centroid index. An empty cluster is
    repaired by moving the point farthest from its own centroid (smallest
    index on ties) out of a cluster that still has at least two members.
    Stops when assignments repeat or after ``max_iter`` rounds. When
    ``inertia_trace`` is a list, the post-assignment inertia of every round
    is appended to it. Returns ``(assignments, centroids, n_iter)``.
    """
    pts_np = np.ascontiguousarray(points, dtype=np.float64)
    cent_np = np.array(centroids, dtype=np.float64, copy=True)
    cdef const double[:, ::1] pts = pts_np
    cdef double[:, ::1] cent = cent_np
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef Py_ssize_t k = cent.shape[0]
    if n == 0:
        raise ValueError("lloyd needs at least one point")
    d2_np = np.empty((n, k))
    own_np = np.empty(n)
    new_np = np.empty(n, dtype=np.int64)
    prev_np = np.empty(n, dtype=np.int64)
    counts_np = np.empty(k, dtype=np.int64)
    acc_np = np.empty(k)
    cdef double[:, ::1] d2 = d2_np
    cdef double[::1] own = own_np
    cdef cnp.int64_t[::1] new_assign = new_np
    cdef cnp.int64_t[::1] prev = prev_np
    cdef cnp.int64_t[::1] counts = counts_np
    cdef double[::1] acc = acc_np
    cdef int c_max_iter = max_iter
    cdef bint have_prev = False
    cdef bint same
    cdef int it = 0
    cdef int round_no
    cdef Py_ssize_t i, c, f, donor
    cdef double sval, diff, best, val
    cdef Py_ssize_t bidx
    for round_no in range(1, c_max_iter + 1):
        it = round_no
        for c in range(k):
            for i in range(n):
                sval = 0.0
                for f in range(d):
                    diff = pts[i, f] - cent[c, f]
                    sval += diff * diff
                d2[i, c] = sval
        for i in range(n):
            best = d2[i, 0]
            bidx = 0
            for c in range(1, k):
                if d2[i, c] < best:
                    best = d2[i, c]
                    bidx = c
            new_assign[i] = bidx
        for c in range(k):
            counts[c] = 0
        for i in range(n):
            counts[new_assign[i]] += 1
        for c in range(k):
            if counts[c] == 0:
                for i in range(n):
                    if counts[new_assign[i]] <= 1:
                        own[i] = -1.0
                    else:
                        own[i] = d2[i, new_assign[i]]
                donor = 0
                val = own[0]
                for i in range(1, n):
                    if own[i] > val:
                        val = own[i]
                        donor = i
                counts[new_assign[donor]] -= 1
                new_assign[donor] = c
                counts[c] = 1
        if inertia_trace is not None:
            for i in range(n):
                own[i] = d2[i, new_assign[i]]
            inertia_trace.append(float(own_np.sum()))
        if have_prev:
            same = True
            for i in range(n):
                if new_assign[i] != prev[i]:
                    same = False
                    break
            if same:
                break
        for i in range(n):
            prev[i] = new_assign[i]
        have_prev = True
        for f in range(d):
            for c in range(k):
                acc[c] = 0.0
            for i in range(n):
                acc[prev[i]] += pts[i, f]
            for c in range(k):
                cent[c, f] = acc[c] / counts[c]
    if not have_prev:
        return None, cent_np, it
    return prev_np.copy(), cent_np, it


def lance_williams(dist0, sizes0, method):
    """Sequential agglomerative merges on a precomputed leaf distance matrix.

    ``dist0`` holds Euclidean distances for single/complete/average linkage
    and squared Euclidean distances for Ward (the caller square-roots Ward
    heights). Candidate pairs are tie-broken by the smallest
    ``(min_id, max_id)`` node-id pair; merged clusters get ids ``n, n+1, ...``
    in merge order. Returns an ``(n-1, 4)`` array of
    ``(left_id, right_id, height, size)`` rows.
    """
    d_np = np.array(dist0, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = d_np.shape[0]
    sizes_np = np.array(sizes0, dtype=np.int64, copy=True)
    merges_np = np.empty((n - 1, 4))
    ids_np = np.arange(n, dtype=np.int64)
    active_np = np.ones(n, dtype=np.uint8)
    np.fill_diagonal(d_np, np.inf)
    cdef double[:, ::1] d = d_np
    cdef cnp.int64_t[::1] sizes = sizes_np
    cdef cnp.int64_t[::1] ids = ids_np
    cdef unsigned char[::1] active = active_np
    cdef double[:, ::1] merges = merges_np
    cdef cnp.int64_t m_id = method
    cdef Py_ssize_t step, si, sj, a, b, r
    cdef double dmin, val, dak, dbk, new, na, nb, nk
    cdef cnp.int64_t ilo, ihi, blo, bhi
    for step in range(n - 1):
        dmin = INFINITY
        a = -1
        b = -1
        blo = 0
        bhi = 0
        for si in range(n):
            if not active[si]:
                continue
            for sj in range(si + 1, n):
                if not active[sj]:
                    continue
                val = d[si, sj]
                if val > dmin:
                    continue
                if ids[si] < ids[sj]:
                    ilo = ids[si]
                    ihi = ids[sj]
                else:
                    ilo = ids[sj]
                    ihi = ids[si]
                if val < dmin or ilo < blo or (ilo == blo and ihi < bhi):
                    dmin = val
                    a = si
                    b = sj
                    blo = ilo
                    bhi = ihi
        merges[step, 0] = <double> blo
        merges[step, 1] = <double> bhi
        merges[step, 2] = dmin
        merges[step, 3] = <double> (sizes[a] + sizes[b])
        na = <double> sizes[a]
        nb = <double> sizes[b]
        for r in range(n):
            if not active[r] or r == a or r == b:
                continue
            if m_id < METHOD_SINGLE or m_id > METHOD_WARD:
                raise ValueError(f"unknown linkage method id {method}")
            dak = d[a, r]
            dbk = d[b, r]
            if m_id == METHOD_SINGLE:
                new = dak if dak < dbk else dbk
            elif m_id == METHOD_COMPLETE:
                new = dak if dak > dbk else dbk
            elif m_id == METHOD_AVERAGE:
                new = (na * dak + nb * dbk) / (na + nb)
            else:
                nk = <double> sizes[r]
                new = ((na + nk) * dak + (nb + nk) * dbk - nk * dmin) / (na + nb + nk)
            d[a, r] = new
            d[r, a] = new
        ids[a] = n + step
        sizes[a] += sizes[b]
        active[b] = 0
        for r in range(n):
            d[b, r] = INFINITY
            d[r, b] = INFINITY
    return merges_np
