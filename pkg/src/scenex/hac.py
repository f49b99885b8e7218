"""Hierarchical agglomerative clustering over scenario feature rows.

The merge loop is the straightforward O(n^3) scheme: scan all active
cluster pairs, merge the closest (ties to the smallest node-id pair), and
update distances with the Lance-Williams recurrence. Ward operates on
squared Euclidean distances internally; reported Ward heights are the
square roots, so a singleton-singleton merge sits at the plain Euclidean
distance and height^2 grows with the merge's SSE increase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scenex import _kernels

LINKAGES = ("ward", "single", "complete", "average")

_METHOD_IDS = {
    "single": _kernels.METHOD_SINGLE,
    "complete": _kernels.METHOD_COMPLETE,
    "average": _kernels.METHOD_AVERAGE,
    "ward": _kernels.METHOD_WARD,
}


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: nodes ``left < right`` joined at ``distance``."""

    left: int
    right: int
    distance: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Full merge tree: leaves 0..n-1, merge k creates node n+k.

    ``row_ids`` optionally names the leaves (scenario ids, in row order).
    """

    n_samples: int
    merges: tuple[Merge, ...]
    linkage: str
    row_ids: tuple[str, ...] | None = None

    def heights(self) -> np.ndarray:
        return np.array([m.distance for m in self.merges])


def _pairwise(rows: np.ndarray, squared: bool) -> np.ndarray:
    diff = rows[:, None, :] - rows[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, 0.0)
    return d2 if squared else np.sqrt(d2)


def _rows_of(m) -> np.ndarray:
    rows = getattr(m, "rows", m)
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("hac expects a 2-d row matrix")
    return rows


def hac(m, linkage: str = "ward") -> Dendrogram:
    """Build the full dendrogram of the row matrix ``m`` (Euclidean metric).

    ``m`` may be a plain array or anything with ``.rows`` / ``.row_ids``
    (the cluster input matrix). Needs at least two rows.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    rows = _rows_of(m)
    n = rows.shape[0]
    if n < 2:
        raise ValueError("hac needs at least two rows")
    if not np.isfinite(rows).all():
        raise ValueError("hac expects finite values")
    ward = linkage == "ward"
    dist0 = _pairwise(rows, squared=ward)
    raw = np.asarray(_kernels.lance_williams(dist0, np.ones(n, dtype=np.int64), _METHOD_IDS[linkage]))
    merges = []
    for step in range(n - 1):
        height = float(raw[step, 2])
        if ward:
            height = float(np.sqrt(max(height, 0.0)))
        merges.append(
            Merge(
                left=int(raw[step, 0]),
                right=int(raw[step, 1]),
                distance=height,
                size=int(raw[step, 3]),
            )
        )
    row_ids = getattr(m, "row_ids", None)
    if row_ids is not None:
        row_ids = tuple(row_ids)
    return Dendrogram(n_samples=n, merges=tuple(merges), linkage=linkage, row_ids=row_ids)


def cut(d: Dendrogram, threshold: float) -> np.ndarray:
    """Assign every leaf to a cluster by dropping merges above ``threshold``.

    Keeps merges with ``distance <= threshold`` and labels the connected
    components 0..k-1 in ascending order of their smallest leaf id.
    """
    if threshold < 0.0:
        raise ValueError("threshold must be >= 0")
    n = d.n_samples
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, m in enumerate(d.merges):
        if m.distance <= threshold:
            node = n + k
            parent[find(m.left)] = node
            parent[find(m.right)] = node
    roots: dict[int, int] = {}
    assignments = np.empty(n, dtype=np.int64)
    for leaf in range(n):
        r = find(leaf)
        if r not in roots:
            roots[r] = len(roots)
        assignments[leaf] = roots[r]
    return assignments


def dendrogram_to_dict(d: Dendrogram) -> dict:
    """JSON-ready form: merge rows are [left, right, distance, size]."""
    out = {
        "n_samples": d.n_samples,
        "linkage": d.linkage,
        "merges": [[m.left, m.right, m.distance, m.size] for m in d.merges],
    }
    if d.row_ids is not None:
        out["row_ids"] = list(d.row_ids)
    return out


def dendrogram_from_dict(obj: dict) -> Dendrogram:
    merges = tuple(
        Merge(left=int(l), right=int(r), distance=float(h), size=int(s))
        for l, r, h, s in obj["merges"]
    )
    row_ids = obj.get("row_ids")
    return Dendrogram(
        n_samples=int(obj["n_samples"]),
        merges=merges,
        linkage=str(obj.get("linkage", "ward")),
        row_ids=tuple(row_ids) if row_ids is not None else None,
    )
