"""NumPy implementations of the hot kernels.

This module is the semantic reference for the compiled extension in
``_core.pyx``: tie-breaking rules, iteration order, and convergence tests
must stay in lockstep between the two, and the parity tests compare them
pair by pair. Reductions are written so that both backends accumulate in
the same order wherever a discrete decision (argmin, tie-break, merge
choice) depends on the result.
"""
from __future__ import annotations

import math

import numpy as np

METHOD_SINGLE = 0
METHOD_COMPLETE = 1
METHOD_AVERAGE = 2
METHOD_WARD = 3


def closest_pair(ex, ey, cx, cy):
    """Frame pair minimizing (distance, |i-j|, i, j) over all (i, j).

    ``ex``/``ey`` are one position series, ``cx``/``cy`` the other.
    Returns ``(i, j, distance)``; ``(-1, -1, inf)`` when either is empty.
    """
    ex = np.ascontiguousarray(ex, dtype=np.float64)
    ey = np.ascontiguousarray(ey, dtype=np.float64)
    cx = np.ascontiguousarray(cx, dtype=np.float64)
    cy = np.ascontiguousarray(cy, dtype=np.float64)
    n = ex.shape[0]
    m = cx.shape[0]
    if n == 0 or m == 0:
        return -1, -1, float("inf")
    dx = ex[:, None] - cx[None, :]
    dy = ey[:, None] - cy[None, :]
    dist = np.sqrt(dx * dx + dy * dy)
    dmin = float(dist.min())
    ii, jj = np.nonzero(dist == dmin)
    gap = np.abs(ii - jj)
    k = np.lexsort((jj, ii, gap))[0]
    return int(ii[k]), int(jj[k]), dmin


def jacobi_eigh(sym, tol=1e-12, max_sweeps=60):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps the strict upper triangle row by row, rotating every nonzero
    pivot, until the off-diagonal Frobenius mass drops below
    ``tol * ||A||_F``. Returns ``(eigenvalues, eigenvectors)`` unsorted;
    column k of the eigenvector matrix belongs to eigenvalue k.
    """
    a = np.array(sym, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), v
    norm0 = math.sqrt(float((a * a).sum()))
    if norm0 == 0.0:
        return np.zeros(n), v
    thresh = tol * norm0
    idx = np.arange(n)
    for _sweep in range(max_sweeps):
        off = math.sqrt(2.0 * float((np.triu(a, 1) ** 2).sum()))
        if off <= thresh:
            return np.diagonal(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = 1.0 / (abs(theta) + math.sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                mask = (idx != p) & (idx != q)
                arp = a[mask, p].copy()
                arq = a[mask, q].copy()
                a[mask, p] = c * arp - s * arq
                a[p, mask] = a[mask, p]
                a[mask, q] = s * arp + c * arq
                a[q, mask] = a[mask, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
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
    pts = np.ascontiguousarray(points, dtype=np.float64)
    cent = np.array(centroids, dtype=np.float64, copy=True)
    n, d = pts.shape
    k = cent.shape[0]
    assign = None
    it = 0
    for it in range(1, max_iter + 1):
        d2 = np.empty((n, k))
        for c in range(k):
            acc = np.zeros(n)
            for f in range(d):
                diff = pts[:, f] - cent[c, f]
                acc += diff * diff
            d2[:, c] = acc
        new_assign = np.argmin(d2, axis=1)
        counts = np.bincount(new_assign, minlength=k)
        for c in range(k):
            if counts[c] == 0:
                own = d2[np.arange(n), new_assign].copy()
                own[counts[new_assign] <= 1] = -1.0
                donor = int(np.argmax(own))
                counts[new_assign[donor]] -= 1
                new_assign[donor] = c
                counts[c] = 1
        if inertia_trace is not None:
            inertia_trace.append(float(d2[np.arange(n), new_assign].sum()))
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for f in range(d):
            cent[:, f] = np.bincount(assign, weights=pts[:, f], minlength=k) / counts
    return assign, cent, it


def lance_williams(dist0, sizes0, method):
    """Sequential agglomerative merges on a precomputed leaf distance matrix.

    ``dist0`` holds Euclidean distances for single/complete/average linkage
    and squared Euclidean distances for Ward (the caller square-roots Ward
    heights). Candidate pairs are tie-broken by the smallest
    ``(min_id, max_id)`` node-id pair; merged clusters get ids ``n, n+1, ...``
    in merge order. Returns an ``(n-1, 4)`` array of
    ``(left_id, right_id, height, size)`` rows.
    """
    d = np.array(dist0, dtype=np.float64, copy=True)
    n = d.shape[0]
    sizes = np.array(sizes0, dtype=np.int64, copy=True)
    ids = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    merges = np.empty((n - 1, 4))
    np.fill_diagonal(d, np.inf)
    for step in range(n - 1):
        slots = np.flatnonzero(active)
        sub = d[np.ix_(slots, slots)]
        iu, ju = np.triu_indices(slots.shape[0], 1)
        vals = sub[iu, ju]
        dmin = float(vals.min())
        cand = np.flatnonzero(vals == dmin)
        ca = slots[iu[cand]]
        cb = slots[ju[cand]]
        ilo = np.minimum(ids[ca], ids[cb])
        ihi = np.maximum(ids[ca], ids[cb])
        pick = np.lexsort((ihi, ilo))[0]
        a = int(ca[pick])
        b = int(cb[pick])
        if a > b:
            a, b = b, a
        merges[step, 0] = min(ids[a], ids[b])
        merges[step, 1] = max(ids[a], ids[b])
        merges[step, 2] = dmin
        merges[step, 3] = sizes[a] + sizes[b]
        rest = np.flatnonzero(active)
        rest = rest[(rest != a) & (rest != b)]
        if rest.size:
            dak = d[a, rest]
            dbk = d[b, rest]
            if method == METHOD_SINGLE:
                new = np.minimum(dak, dbk)
            elif method == METHOD_COMPLETE:
                new = np.maximum(dak, dbk)
            elif method == METHOD_AVERAGE:
                na = float(sizes[a])
                nb = float(sizes[b])
                new = (na * dak + nb * dbk) / (na + nb)
            elif method == METHOD_WARD:
                na = float(sizes[a])
                nb = float(sizes[b])
                nk = sizes[rest].astype(np.float64)
                new = ((na + nk) * dak + (nb + nk) * dbk - nk * dmin) / (na + nb + nk)
            else:
                raise ValueError(f"unknown linkage method id {method}")
            d[a, rest] = new
            d[rest, a] = new
        ids[a] = n + step
        sizes[a] += sizes[b]
        active[b] = False
        d[b, :] = np.inf
        d[:, b] = np.inf
    return merges
