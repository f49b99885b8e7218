"""Spatiotemporal relevance filter.

A pair of road users is relevant when their paths nearly touch and they
occupy that near-touch region close in time: over the common observation
window, find the frame pair (i, j) with the smallest Euclidean distance
between the ego position at frame i and the challenger position at frame j
(ties: smallest |i-j|, then smallest i, then smallest j). The pair is
accepted when that distance is at most ``d_traj`` and the time gap
``|t_i - t_j|`` (the post-encroachment time) is at most ``t_pet``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from scenex import _kernels
from scenex.trajectory import (
    BICYCLE,
    CAR,
    PEDESTRIAN,
    TRUCK_BUS,
    Recording,
    Trajectory,
    ego_candidates,
)

#: Scenario category by challenger class.
CATEGORY_BY_CLASS = {
    CAR: "e_to_v",
    TRUCK_BUS: "e_to_v",
    PEDESTRIAN: "e_to_p",
    BICYCLE: "e_to_b",
}
CATEGORIES = ("e_to_v", "e_to_p", "e_to_b")


@dataclass(frozen=True)
class FilterParams:
    """Acceptance thresholds: trajectory distance in meters, PET in seconds."""

    d_traj: float = 1.0
    t_pet: float = 3.0

    def __post_init__(self):
        if self.d_traj <= 0.0 or self.t_pet <= 0.0:
            raise ValueError("filter thresholds must be positive")


@dataclass(frozen=True)
class InteractionRecord:
    """The minimizing frame pair of an accepted ego/challenger encounter."""

    ego_id: int
    challenger_id: int
    min_distance: float
    pet: float
    ego_frame_at_min: int
    challenger_frame_at_min: int


@dataclass(frozen=True)
class ConcreteScenario:
    """One accepted encounter, windowed to the pair's common frame range.

    ``others`` holds every further road user sliced to its overlap with the
    window. ``category`` derives from the challenger class: e_to_v for
    vehicles, e_to_p for pedestrians, e_to_b for bicyclists.
    """

    scenario_id: str
    recording_id: str
    frame_rate: float
    ego: Trajectory
    challenger: Trajectory
    others: tuple[Trajectory, ...]
    interaction: InteractionRecord
    category: str
    frame_start: int
    frame_end: int


def scenario_key(recording_id: str, ego_id: int, challenger_id: int) -> str:
    """Stable scenario identifier, filename- and URL-safe."""
    return f"{recording_id}_e{ego_id}_c{challenger_id}"


def common_window(a: Trajectory, b: Trajectory) -> tuple[int, int] | None:
    """Inclusive frame window both tracks observe, or None when disjoint."""
    a0, a1 = a.frame_range
    b0, b1 = b.frame_range
    f0 = max(a0, b0)
    f1 = min(a1, b1)
    if f1 < f0:
        return None
    return f0, f1


def distance_matrix(ego: Trajectory, challenger: Trajectory) -> np.ndarray:
    """All-pairs Euclidean distances over the common window.

    Entry (i, j) is the distance between the ego position at common frame
    ``f0 + i`` and the challenger position at common frame ``f0 + j``.
    Disjoint frame ranges yield an empty (0, 0) matrix, not an error.
    """
    win = common_window(ego, challenger)
    if win is None:
        return np.empty((0, 0))
    f0, f1 = win
    es = ego.slice_frames(f0, f1)
    cs = challenger.slice_frames(f0, f1)
    dx = es.x[:, None] - cs.x[None, :]
    dy = es.y[:, None] - cs.y[None, :]
    return np.sqrt(dx * dx + dy * dy)


def detect_interaction(
    ego: Trajectory,
    challenger: Trajectory,
    p: FilterParams,
    frame_rate: float,
) -> InteractionRecord | None:
    """Accept or reject one ego/challenger pair.

    Returns the interaction record of the minimizing frame pair, or None
    when the tracks never co-occur, never come within ``d_traj``, or the
    PET at the minimizing pair exceeds ``t_pet``.
    """
    win = common_window(ego, challenger)
    if win is None:
        return None
    f0, f1 = win
    es = ego.slice_frames(f0, f1)
    cs = challenger.slice_frames(f0, f1)
    i, j, dist = _kernels.closest_pair(es.x, es.y, cs.x, cs.y)
    if i < 0 or dist > p.d_traj:
        return None
    pet = abs(i - j) / frame_rate
    if pet > p.t_pet:
        return None
    return InteractionRecord(
        ego_id=ego.track_id,
        challenger_id=challenger.track_id,
        min_distance=float(dist),
        pet=float(pet),
        ego_frame_at_min=f0 + int(i),
        challenger_frame_at_min=f0 + int(j),
    )


def _build_scenario(rec: Recording, ego: Trajectory, challenger: Trajectory, record: InteractionRecord) -> ConcreteScenario:
    f0, f1 = common_window(ego, challenger)
    others = []
    for t in rec.trajectories:
        if t.track_id in (ego.track_id, challenger.track_id):
            continue
        o0, o1 = t.frame_range
        s0 = max(f0, o0)
        s1 = min(f1, o1)
        if s1 >= s0:
            others.append(t.slice_frames(s0, s1))
    return ConcreteScenario(
        scenario_id=scenario_key(rec.recording_id, ego.track_id, challenger.track_id),
        recording_id=rec.recording_id,
        frame_rate=rec.frame_rate,
        ego=ego.slice_frames(f0, f1),
        challenger=challenger.slice_frames(f0, f1),
        others=tuple(others),
        interaction=record,
        category=CATEGORY_BY_CLASS[challenger.ru_class],
        frame_start=f0,
        frame_end=f1,
    )


def extract_scenarios(rec: Recording, p: FilterParams, workers: int = 1) -> list[ConcreteScenario]:
    """Run the filter over every (ego candidate, other RU) pair.

    Every accepted pair becomes one scenario; an empty result is a valid
    outcome. The list is sorted by (recording, ego id, challenger id), so
    the output does not depend on ``workers``.
    """
    egos = ego_candidates(rec)
    pairs = []
    for ego in egos:
        for other in rec.trajectories:
            if other.track_id == ego.track_id:
                continue
            if common_window(ego, other) is None:
                continue
            pairs.append((ego, other))

    def evaluate(pair):
        ego, other = pair
        return pair, detect_interaction(ego, other, p, rec.frame_rate)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, pairs))
    else:
        results = [evaluate(pair) for pair in pairs]

    scenarios = [
        _build_scenario(rec, ego, other, record)
        for (ego, other), record in results
        if record is not None
    ]
    scenarios.sort(key=lambda s: (s.recording_id, s.ego.track_id, s.challenger.track_id))
    return scenarios
