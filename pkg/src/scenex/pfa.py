"""Principal feature analysis: pick a representative subset of columns.

Rather than projecting onto principal components, the analysis keeps
original columns. The standardized data's covariance matrix is
eigendecomposed, the leading ``s`` eigenvectors (enough to explain
``var_pfa`` of the variance) form per-feature loading rows, and k-means
with ``q = s + q_offset`` clusters groups features with similar absolute
loadings. From each cluster the feature closest to the cluster centroid
is retained.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scenex import numerics


@dataclass(frozen=True)
class PfaResult:
    """Outcome of a principal feature analysis run.

    ``selected_features`` are column indices into the input matrix, in
    ascending order. ``feature_clusters`` maps each k-means cluster id to
    its member feature indices; ``cumulative_variance[i]`` is the
    variance ratio explained by the first ``i + 1`` eigenvalues.
    """

    selected_features: tuple[int, ...]
    s: int
    q: int
    feature_clusters: dict[int, tuple[int, ...]]
    cumulative_variance: tuple[float, ...]


def principal_feature_analysis(
    data: np.ndarray,
    var_pfa: float = 0.95,
    q_offset: int = 1,
    seed: int = 0,
) -> PfaResult:
    """Select q representative columns of ``data`` (shape (n, d), n >= 2).

    Requires 0 < var_pfa < 1, q_offset >= 1, and s + q_offset <= d where s
    is the retained subspace dimension; violations raise ValueError.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError("data must be 2-dimensional")
    n, d = x.shape
    if n < 2:
        raise ValueError("need at least two rows")
    if d < 2:
        raise ValueError("need at least two columns")
    if not 0.0 < var_pfa < 1.0:
        raise ValueError("var_pfa must lie in (0, 1)")
    if q_offset < 1:
        raise ValueError("q_offset must be at least 1")

    std = numerics.standardize(x)
    cov = (std.values.T @ std.values) / n
    eig = numerics.sym_eigen(cov)
    total = float(np.sum(eig.eigenvalues))
    if total <= 0.0:
        raise ValueError("data has no variance to analyze")
    cumulative = np.cumsum(eig.eigenvalues) / total
    s = int(np.searchsorted(cumulative, var_pfa) + 1)
    s = min(s, d)
    q = s + q_offset
    if q > d:
        raise ValueError(f"s + q_offset = {q} exceeds the feature count {d}")

    loadings = np.abs(eig.eigenvectors[:, :s])
    assignments, _ = numerics.kmeans(loadings, q, seed=seed)

    selected = []
    clusters: dict[int, tuple[int, ...]] = {}
    for c in range(q):
        members = np.flatnonzero(assignments == c)
        clusters[c] = tuple(int(m) for m in members)
        centroid = loadings[members].mean(axis=0)
        diff = loadings[members] - centroid[None, :]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        best = members[int(np.argmin(dist))]
        selected.append(int(best))
    selected.sort()

    return PfaResult(
        selected_features=tuple(selected),
        s=s,
        q=q,
        feature_clusters=clusters,
        cumulative_variance=tuple(float(c) for c in cumulative),
    )
