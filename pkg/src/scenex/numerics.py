"""Self-contained numerical routines: standardization, symmetric
eigendecomposition, PCA, and k-means.

Everything here is implemented in-repo (cyclic Jacobi rotations, Lloyd
iterations); numpy supplies array storage and elementwise arithmetic only.
All routines are deterministic: ties are broken by the smallest index and
eigenvector signs follow a fixed convention, so repeated runs on the same
input produce the same output bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scenex import _kernels

#: Eigenvalues of covariance matrices above this negative floor are treated
#: as numerical zeros and clamped to 0.
EIGENVALUE_CLAMP = -1e-10

_SYMMETRY_TOL = 1e-9
_RANK_REL_TOL = 1e-12


@dataclass(frozen=True)
class StandardizedMatrix:
    """Column-standardized data plus the statistics used to produce it.

    ``zero_variance`` marks columns whose population std was exactly zero;
    those columns are all zeros in ``values`` (the mean was removed, nothing
    was divided).
    """

    values: np.ndarray
    col_means: np.ndarray
    col_stds: np.ndarray
    zero_variance: np.ndarray


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order; eigenvector k in column k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class PcaModel:
    """Retained principal axes of a standardized data matrix.

    ``components`` has one retained eigenvector per column, ``s`` counts
    them, and ``retained_variance`` is the cumulative explained-variance
    ratio at ``s``.
    """

    components: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float
    retained_variance: float
    s: int


def standardize(data) -> StandardizedMatrix:
    """Remove the column mean and divide by the population std.

    Zero-variance columns are flagged and left at zero instead of dividing.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError("standardize expects a nonempty 2-d matrix")
    if not np.isfinite(x).all():
        raise ValueError("standardize expects finite values")
    means = x.mean(axis=0)
    centered = x - means
    stds = np.sqrt((centered * centered).mean(axis=0))
    zero = stds == 0.0
    safe = np.where(zero, 1.0, stds)
    values = centered / safe
    values[:, zero] = 0.0
    return StandardizedMatrix(values=values, col_means=means, col_stds=stds, zero_variance=zero)


def sym_eigen(c) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix via cyclic Jacobi rotations.

    The input must be symmetric within 1e-9 (absolute); it is symmetrized
    exactly before rotation. Eigenvalues come back in descending order with
    a deterministic sign convention: the largest-magnitude entry of every
    eigenvector is positive.
    """
    a = np.asarray(c, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("sym_eigen expects a square matrix")
    if not np.isfinite(a).all():
        raise ValueError("sym_eigen expects finite values")
    if float(np.abs(a - a.T).max()) > _SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric within 1e-9")
    sym = (a + a.T) / 2.0
    vals, vecs = _kernels.jacobi_eigh(sym)
    vals = np.asarray(vals)
    vecs = np.asarray(vecs)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        pivot = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[pivot, k] < 0.0:
            vecs[:, k] = -vecs[:, k]
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def _clamped(vals: np.ndarray) -> np.ndarray:
    if vals.size and float(vals.min()) < EIGENVALUE_CLAMP:
        raise ValueError("covariance eigenvalue below the numerical-noise floor")
    return np.maximum(vals, 0.0)


def _pick_s(vals: np.ndarray, total: float, var_ratio: float) -> int:
    cum = np.cumsum(vals) / total
    for k in range(cum.shape[0]):
        if cum[k] >= var_ratio:
            return k + 1
    return cum.shape[0]


def pca_reduce(data, var_ratio: float):
    """Project standardized data onto its leading principal axes.

    ``s`` is the smallest count of eigenvalues whose cumulative share of the
    total variance reaches ``var_ratio``. When the matrix has fewer rows than
    columns the decomposition runs on the Gram matrix (same nonzero spectrum)
    and the axes are recovered from the row-space eigenvectors. Returns
    ``(reduced, model)`` with ``reduced = standardized @ components``.
    """
    if not 0.0 < var_ratio <= 1.0:
        raise ValueError("var_ratio must lie in (0, 1]")
    std = standardize(data)
    x = std.values
    n, d = x.shape
    if n >= d:
        cov = (x.T @ x) / n
        eig = sym_eigen(cov)
        vals = _clamped(eig.eigenvalues)
        total = float(vals.sum())
        if total <= 0.0:
            raise ValueError("data has no variance to reduce")
        rank_tol = float(vals.max()) * _RANK_REL_TOL
        nonzero = int((vals > rank_tol).sum())
        s = min(_pick_s(vals, total, var_ratio), max(nonzero, 1))
        components = eig.eigenvectors[:, :s].copy()
        kept = vals[:s]
    else:
        gram = (x @ x.T) / n
        eig = sym_eigen(gram)
        vals = _clamped(eig.eigenvalues)
        total = float(vals.sum())
        if total <= 0.0:
            raise ValueError("data has no variance to reduce")
        rank_tol = float(vals.max()) * _RANK_REL_TOL
        nonzero = int((vals > rank_tol).sum())
        s = min(_pick_s(vals, total, var_ratio), max(nonzero, 1))
        components = np.empty((d, s))
        for k in range(s):
            lam = vals[k]
            axis = x.T @ eig.eigenvectors[:, k]
            components[:, k] = axis / np.sqrt(n * lam)
        kept = vals[:s]
    retained = float(kept.sum() / total)
    model = PcaModel(
        components=components,
        eigenvalues=vals,
        total_variance=total,
        retained_variance=retained,
        s=s,
    )
    return x @ components, model


def _farthest_point_seeds(pts: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Greedy farthest-point seeding; the seed picks the first centroid."""
    n = pts.shape[0]
    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    chosen = [first]
    diff = pts - pts[first]
    mind2 = np.einsum("ij,ij->i", diff, diff)
    while len(chosen) < k:
        nxt = int(np.argmax(mind2))
        chosen.append(nxt)
        diff = pts - pts[nxt]
        d2 = np.einsum("ij,ij->i", diff, diff)
        mind2 = np.minimum(mind2, d2)
    return pts[chosen].copy()


def kmeans(points, k: int, seed: int = 0, max_iter: int = 300, inertia_trace=None):
    """Deterministic k-means: farthest-point seeding plus Lloyd iterations.

    ``inertia_trace`` (a list, if given) receives the inertia after every
    assignment step; tracing always runs the reference NumPy loop. Returns
    ``(assignments, centroids)``.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("kmeans expects a nonempty 2-d matrix")
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    seeds = _farthest_point_seeds(pts, k, seed)
    if inertia_trace is not None:
        assign, cent, _ = _kernels.pure.lloyd(pts, seeds, max_iter, inertia_trace)
    else:
        assign, cent, _ = _kernels.lloyd(pts, seeds, max_iter)
    return np.asarray(assign), np.asarray(cent)
