"""External cluster validation against a label set.

A clustering is scored by majority vote: within each cluster the most
frequent label is counted once per member carrying it, and the counts
are summed over clusters and divided by the sample total. Label sets
carry their provenance (rule-based baseline, synthetic ground truth, or
manual annotation) so differently sourced scores are never conflated.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from scenex.errors import CoverageError
from scenex.hac import Dendrogram, cut

LABEL_SOURCES = ("rule_based_baseline", "ground_truth_synthetic", "manual")


@dataclass(frozen=True)
class LabelSet:
    """scenario_id -> label, tagged with where the labels came from."""

    labels: dict[str, str]
    source: str

    def __post_init__(self):
        if self.source not in LABEL_SOURCES:
            raise ValueError(f"unknown label source {self.source!r}")


@dataclass(frozen=True)
class ClusterScore:
    cluster_id: int
    size: int
    majority_label: str
    accuracy: float


@dataclass(frozen=True)
class ValidationReport:
    """Clustering quality at one threshold (threshold None if standalone)."""

    threshold: float | None
    n_clusters: int
    overall_accuracy: float
    per_cluster: tuple[ClusterScore, ...]
    label_source: str


def overall_accuracy(
    assignments: dict[str, int],
    labels: LabelSet,
    threshold: float | None = None,
) -> ValidationReport:
    """Majority-label accuracy of a scenario_id -> cluster assignment.

    Majority ties resolve to the lexicographically smallest label. Every
    assigned id must be labeled; a missing one raises CoverageError.
    """
    if not assignments:
        raise ValueError("no assignments to score")
    members: dict[int, list[str]] = {}
    for sid in sorted(assignments):
        if sid not in labels.labels:
            raise CoverageError(f"scenario {sid!r} has no label")
        members.setdefault(int(assignments[sid]), []).append(labels.labels[sid])

    scores = []
    majority_total = 0
    for cluster_id in sorted(members):
        tags = members[cluster_id]
        counts = Counter(tags)
        best = max(counts.values())
        majority = min(label for label, c in counts.items() if c == best)
        majority_total += best
        scores.append(
            ClusterScore(
                cluster_id=cluster_id,
                size=len(tags),
                majority_label=majority,
                accuracy=best / len(tags),
            )
        )
    return ValidationReport(
        threshold=threshold,
        n_clusters=len(scores),
        overall_accuracy=majority_total / len(assignments),
        per_cluster=tuple(scores),
        label_source=labels.source,
    )


def accuracy_curve(d: Dendrogram, labels: LabelSet, thresholds) -> list[ValidationReport]:
    """One report per threshold, via a dendrogram cut at each.

    Thresholds must be strictly ascending; the dendrogram must carry
    row_ids so clusters can be matched to labels.
    """
    ts = [float(t) for t in thresholds]
    if not ts:
        raise ValueError("no thresholds given")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("thresholds must be strictly ascending")
    if d.row_ids is None:
        raise ValueError("dendrogram carries no row ids")
    reports = []
    for t in ts:
        assign = cut(d, t)
        mapping = {sid: int(assign[i]) for i, sid in enumerate(d.row_ids)}
        reports.append(overall_accuracy(mapping, labels, threshold=t))
    return reports


def report_to_dict(r: ValidationReport) -> dict:
    return {
        "threshold": r.threshold,
        "n_clusters": r.n_clusters,
        "overall_accuracy": r.overall_accuracy,
        "label_source": r.label_source,
        "per_cluster": [
            {
                "cluster_id": c.cluster_id,
                "size": c.size,
                "majority_label": c.majority_label,
                "accuracy": c.accuracy,
            }
            for c in r.per_cluster
        ],
    }


def report_from_dict(obj: dict) -> ValidationReport:
    return ValidationReport(
        threshold=None if obj["threshold"] is None else float(obj["threshold"]),
        n_clusters=int(obj["n_clusters"]),
        overall_accuracy=float(obj["overall_accuracy"]),
        label_source=obj["label_source"],
        per_cluster=tuple(
            ClusterScore(
                cluster_id=int(c["cluster_id"]),
                size=int(c["size"]),
                majority_label=c["majority_label"],
                accuracy=float(c["accuracy"]),
            )
            for c in obj["per_cluster"]
        ),
    )
