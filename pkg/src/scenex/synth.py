"""Deterministic synthetic intersection traffic with per-pair ground truth.

Five templates model a four-arm intersection centered at the origin:

* ``left_turn_oncoming``   - ego turns left across an oncoming car.
* ``pedestrian_crossing``  - ego turns right; a pedestrian is on the
  crosswalk of the exit arm.
* ``bicycle_crossing``     - ego drives straight; a bicyclist swerves
  across the ego lane just north of the intersection.
* ``straight_follow``      - ego follows a leading car in the same lane
  within a short time headway.
* ``straight_uninvolved``  - a lone car passes straight through.

Instances of a template are randomized in entry arm (90-degree rotations
about the intersection center, applied exactly), speed scale (+-20%), the
ego/challenger timing offset at the conflict point, and an entry-time
jitter. Instances are laid out in disjoint time slots, so cross-instance
interactions cannot occur and the generated ground truth covers every
extractable scenario. Randomness is drawn from a counter-based generator
keyed by (seed, template, instance index); the same arguments reproduce
the same recording bit for bit.

Velocities are central finite differences of the sampled positions (and
accelerations of the velocities), so the emitted columns are exactly
kinematically consistent with the geometry.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from scenex.errors import GenerationError
from scenex.petfilter import scenario_key
from scenex.trajectory import (
    BICYCLE,
    CAR,
    PEDESTRIAN,
    Recording,
    Trajectory,
    VEHICLE_CLASSES,
    wrap_heading,
)

LEFT_TURN_ONCOMING = "left_turn_oncoming"
PEDESTRIAN_CROSSING = "pedestrian_crossing"
BICYCLE_CROSSING = "bicycle_crossing"
STRAIGHT_FOLLOW = "straight_follow"
STRAIGHT_UNINVOLVED = "straight_uninvolved"

TEMPLATE_NAMES = (
    LEFT_TURN_ONCOMING,
    PEDESTRIAN_CROSSING,
    BICYCLE_CROSSING,
    STRAIGHT_FOLLOW,
    STRAIGHT_UNINVOLVED,
)

#: Footprint (width, length) in meters per road-user class.
FOOTPRINTS = {CAR: (2.0, 4.5), BICYCLE: (0.6, 1.8), PEDESTRIAN: (0.0, 0.0)}

_LANE = 1.75
_ENTRY = 35.0
_SLOT_GAP_S = 1.0
_JITTER_MAX_S = 0.5


@dataclass(frozen=True)
class Segment:
    """One path primitive: a straight line or a circular arc.

    ``turn`` is the signed total arc angle (positive = left); lines have
    ``turn == 0``. ``length`` is the arc length in meters.
    """

    length: float
    radius: float = 0.0
    turn: float = 0.0


def line(length: float) -> Segment:
    return Segment(length=float(length))


def arc(radius: float, turn: float) -> Segment:
    return Segment(length=abs(turn) * radius, radius=float(radius), turn=float(turn))


@dataclass(frozen=True)
class SpeedProfile:
    """Piecewise-linear speed over arc length; speeds must stay positive."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if any(v <= 0.0 for _, v in self.breakpoints):
            raise GenerationError("speed profile must stay positive")

    def speed_at(self, s: float) -> float:
        bs = [b for b, _ in self.breakpoints]
        vs = [v for _, v in self.breakpoints]
        return float(np.interp(s, bs, vs))


@dataclass(frozen=True)
class PathSpec:
    """A start pose, path segments, and the speed profile along them."""

    start: tuple[float, float, float]
    segments: tuple[Segment, ...]
    speed: SpeedProfile

    @property
    def total_length(self) -> float:
        return sum(seg.length for seg in self.segments)

    def pose_at(self, s: float) -> tuple[float, float, float]:
        x, y, h = self.start
        remaining = s
        for seg in self.segments:
            u = min(remaining, seg.length)
            if seg.turn == 0.0:
                x += u * math.cos(h)
                y += u * math.sin(h)
            else:
                sign = 1.0 if seg.turn > 0.0 else -1.0
                r = seg.radius
                cx = x - sign * r * math.sin(h)
                cy = y + sign * r * math.cos(h)
                a0 = math.atan2(y - cy, x - cx)
                a1 = a0 + sign * u / r
                x = cx + r * math.cos(a1)
                y = cy + r * math.sin(a1)
                h = h + sign * u / r
            remaining -= u
            if remaining <= 0.0:
                break
        return x, y, h


@dataclass(frozen=True)
class ScenarioTemplate:
    """Parametric two-party (or lone-vehicle) encounter geometry.

    ``timing_offset_range`` bounds |arrival-time gap| at the conflict point
    in seconds; ``offset_signs`` says which party may arrive first
    (+1: challenger after ego). ``follow_along`` marks the challenger as a
    leader on the ego's own path, where the offset is the time headway.
    """

    name: str
    ego_path: PathSpec
    challenger_path: PathSpec | None
    challenger_class: str | None
    timing_offset_range: tuple[float, float]
    offset_signs: tuple[int, ...] = (1, -1)
    follow_along: bool = False


def _cruise(v: float) -> SpeedProfile:
    return SpeedProfile(breakpoints=((0.0, v),))


def _slow_zone(v_cruise: float, v_slow: float, s0: float, s1: float, total: float, ramp: float = 6.0) -> SpeedProfile:
    return SpeedProfile(
        breakpoints=(
            (0.0, v_cruise),
            (max(s0 - ramp, 0.0), v_cruise),
            (s0, v_slow),
            (s1, v_slow),
            (min(s1 + ramp, total), v_cruise),
            (total, v_cruise),
        )
    )


def _build_templates() -> dict[str, ScenarioTemplate]:
    templates = {}

    # Ego turns left from the south arm onto the west arm; an oncoming car
    # comes straight down the north arm.
    turn_r = 2.0 * _LANE + 4.25
    segs = (line(_ENTRY - 6.0), arc(turn_r, math.pi / 2.0), line(_ENTRY - 6.0))
    s0 = segs[0].length
    s1 = s0 + segs[1].length
    ego = PathSpec(
        start=(_LANE, -_ENTRY, math.pi / 2.0),
        segments=segs,
        speed=_slow_zone(8.0, 4.0, s0, s1, sum(s.length for s in segs)),
    )
    oncoming = PathSpec(
        start=(-_LANE, _ENTRY, -math.pi / 2.0),
        segments=(line(2.0 * _ENTRY),),
        speed=_cruise(8.0),
    )
    templates[LEFT_TURN_ONCOMING] = ScenarioTemplate(
        name=LEFT_TURN_ONCOMING,
        ego_path=ego,
        challenger_path=oncoming,
        challenger_class=CAR,
        timing_offset_range=(0.8, 1.6),
        offset_signs=(1, -1),
    )

    # Ego turns right from the south arm onto the east arm; a pedestrian is
    # on the exit-arm crosswalk.
    turn_r = 5.5
    segs = (line(_ENTRY - turn_r - _LANE), arc(turn_r, -math.pi / 2.0), line(_ENTRY - turn_r - _LANE))
    s0 = segs[0].length
    s1 = s0 + segs[1].length
    ego = PathSpec(
        start=(_LANE, -_ENTRY, math.pi / 2.0),
        segments=segs,
        speed=_slow_zone(8.0, 3.5, s0, s1, sum(s.length for s in segs)),
    )
    walker = PathSpec(
        start=(12.0, -7.0, math.pi / 2.0),
        segments=(line(14.0),),
        speed=_cruise(1.4),
    )
    templates[PEDESTRIAN_CROSSING] = ScenarioTemplate(
        name=PEDESTRIAN_CROSSING,
        ego_path=ego,
        challenger_path=walker,
        challenger_class=PEDESTRIAN,
        timing_offset_range=(0.8, 2.2),
        offset_signs=(1, -1),
    )

    # Ego drives straight through; a bicyclist swerves across the ego lane
    # just north of the intersection.
    ego = PathSpec(
        start=(_LANE, -_ENTRY, math.pi / 2.0),
        segments=(line(2.0 * _ENTRY),),
        speed=_cruise(8.0),
    )
    bike = PathSpec(
        start=(22.0, 6.0, math.pi),
        segments=(line(8.0), arc(18.0, 0.22), arc(18.0, -0.22), line(26.0)),
        speed=_cruise(4.0),
    )
    templates[BICYCLE_CROSSING] = ScenarioTemplate(
        name=BICYCLE_CROSSING,
        ego_path=ego,
        challenger_path=bike,
        challenger_class=BICYCLE,
        timing_offset_range=(0.8, 2.2),
        offset_signs=(1,),
    )

    # Ego follows a leading car on the same lane within a short headway.
    ego = PathSpec(
        start=(_LANE, -_ENTRY, math.pi / 2.0),
        segments=(line(2.0 * _ENTRY),),
        speed=_cruise(8.0),
    )
    templates[STRAIGHT_FOLLOW] = ScenarioTemplate(
        name=STRAIGHT_FOLLOW,
        ego_path=ego,
        challenger_path=ego,
        challenger_class=CAR,
        timing_offset_range=(1.0, 1.6),
        offset_signs=(1,),
        follow_along=True,
    )

    # A lone car passes straight through, interacting with nobody.
    ego = PathSpec(
        start=(-_LANE, _ENTRY, -math.pi / 2.0),
        segments=(line(2.0 * _ENTRY),),
        speed=_cruise(8.0),
    )
    templates[STRAIGHT_UNINVOLVED] = ScenarioTemplate(
        name=STRAIGHT_UNINVOLVED,
        ego_path=ego,
        challenger_path=None,
        challenger_class=None,
        timing_offset_range=(0.0, 0.0),
        offset_signs=(1,),
    )
    return templates


TEMPLATES = _build_templates()


@dataclass(frozen=True)
class GroundTruth:
    """Template label per extractable scenario id."""

    labels: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"labels": self.labels}, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "GroundTruth":
        obj = json.loads(text)
        return GroundTruth(labels={str(k): str(v) for k, v in obj["labels"].items()})


def _sample_along(path: PathSpec, scale: float, dt: float):
    """Sample poses at the frame grid while following the speed profile."""
    total = path.total_length
    samples = []
    s = 0.0
    while s < total:
        samples.append(s)
        v1 = path.speed.speed_at(s) * scale
        half = min(s + 0.5 * dt * v1, total)
        v2 = path.speed.speed_at(half) * scale
        s = s + dt * v2
    xs = np.empty(len(samples))
    ys = np.empty(len(samples))
    hs = np.empty(len(samples))
    for i, si in enumerate(samples):
        xs[i], ys[i], hs[i] = path.pose_at(si)
    return np.asarray(samples), xs, ys, hs


def _conflict_lengths(a: PathSpec, b: PathSpec) -> tuple[float, float]:
    """Arc lengths at which the two paths pass closest to each other."""
    ds = 0.05
    sa = np.arange(0.0, a.total_length, ds)
    sb = np.arange(0.0, b.total_length, ds)
    pa = np.array([a.pose_at(s)[:2] for s in sa])
    pb = np.array([b.pose_at(s)[:2] for s in sb])
    dx = pa[:, 0][:, None] - pb[:, 0][None, :]
    dy = pa[:, 1][:, None] - pb[:, 1][None, :]
    d2 = dx * dx + dy * dy
    i, j = np.unravel_index(int(np.argmin(d2)), d2.shape)
    return float(sa[i]), float(sb[j])


@dataclass
class _RuDraft:
    role: str
    ru_class: str
    start_frame: int
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray


def _realize_instance(template: ScenarioTemplate, rng, frame_rate: float, conflict_cache: dict):
    dt = 1.0 / frame_rate
    k_arm = int(rng.integers(4))
    scale = 1.0 + float(rng.uniform(-0.2, 0.2))
    lo, hi = template.timing_offset_range
    offset = float(rng.uniform(lo, hi))
    sign = int(template.offset_signs[int(rng.integers(len(template.offset_signs)))])
    jitter_frames = int(rng.integers(0, int(round(_JITTER_MAX_S * frame_rate)) + 1))

    _, ex, ey, eh = _sample_along(template.ego_path, scale, dt)
    drafts = []
    if template.challenger_path is None:
        delays = {"ego": 0}
        drafts.append(("ego", CAR, ex, ey, eh))
    elif template.follow_along:
        _, cx, cy, ch = _sample_along(template.challenger_path, scale, dt)
        delays = {"ego": int(round(offset * frame_rate)), "challenger": 0}
        drafts.append(("ego", CAR, ex, ey, eh))
        drafts.append(("challenger", template.challenger_class, cx, cy, ch))
    else:
        key = template.name
        if key not in conflict_cache:
            conflict_cache[key] = _conflict_lengths(template.ego_path, template.challenger_path)
        s_conf_e, s_conf_c = conflict_cache[key]
        ss_e, _, _, _ = _sample_along(template.ego_path, scale, dt)
        ss_c, cx_, cy_, ch_ = _sample_along(template.challenger_path, scale, dt)
        t_e = dt * float(np.searchsorted(ss_e, s_conf_e))
        t_c = dt * float(np.searchsorted(ss_c, s_conf_c))
        delta = sign * offset - (t_c - t_e)
        delays = {
            "ego": int(round(max(-delta, 0.0) * frame_rate)),
            "challenger": int(round(max(delta, 0.0) * frame_rate)),
        }
        drafts.append(("ego", CAR, ex, ey, eh))
        drafts.append(("challenger", template.challenger_class, cx_, cy_, ch_))

    out = []
    for role, ru_class, xs, ys, hs in drafts:
        xr = xs.copy()
        yr = ys.copy()
        for _ in range(k_arm % 4):
            xr, yr = -yr, xr
        hr = wrap_heading(hs + k_arm * (math.pi / 2.0))
        out.append(
            _RuDraft(
                role=role,
                ru_class=ru_class,
                start_frame=jitter_frames + delays[role],
                x=xr,
                y=yr,
                heading=hr,
            )
        )
    return out


def _finalize_track(track_id: int, draft: _RuDraft, frame_rate: float) -> Trajectory:
    n = draft.x.shape[0]
    frames = draft.start_frame + np.arange(n, dtype=np.int64)
    x_vel = np.gradient(draft.x) * frame_rate
    y_vel = np.gradient(draft.y) * frame_rate
    x_acc = np.gradient(x_vel) * frame_rate
    y_acc = np.gradient(y_vel) * frame_rate
    ch = np.cos(draft.heading)
    sh = np.sin(draft.heading)
    width, length = FOOTPRINTS[draft.ru_class]
    return Trajectory(
        track_id=track_id,
        ru_class=draft.ru_class,
        width=width,
        length=length,
        frames=frames,
        x=draft.x.copy(),
        y=draft.y.copy(),
        heading=draft.heading.copy(),
        x_vel=x_vel,
        y_vel=y_vel,
        x_acc=x_acc,
        y_acc=y_acc,
        lon_vel=x_vel * ch + y_vel * sh,
        lat_vel=-x_vel * sh + y_vel * ch,
        lon_acc=x_acc * ch + y_acc * sh,
        lat_acc=-x_acc * sh + y_acc * ch,
    )


def generate(
    templates,
    seed: int,
    frame_rate: float = 25.0,
    extent: tuple[float, float, float, float] = (-40.0, 40.0, -40.0, 40.0),
) -> tuple[Recording, GroundTruth]:
    """Build a recording from (template, count) requests plus its ground truth.

    ``templates`` is an iterable of ``(ScenarioTemplate | name, count)``.
    The same (templates, seed, frame_rate) reproduce the identical
    recording; template geometry that leaves ``extent`` raises
    GenerationError.
    """
    if frame_rate <= 0.0:
        raise GenerationError("frame rate must be positive")
    requested: dict[str, tuple[ScenarioTemplate, int]] = {}
    for entry, count in templates:
        template = TEMPLATES[entry] if isinstance(entry, str) else entry
        if count < 0:
            raise GenerationError("negative instance count")
        if template.name in requested:
            prev, prev_count = requested[template.name]
            if prev is not template:
                raise GenerationError(f"conflicting definitions for template {template.name!r}")
            requested[template.name] = (prev, prev_count + count)
        else:
            requested[template.name] = (template, count)

    ordered_names = sorted(requested)
    recording_id = f"synth{seed}"
    conflict_cache: dict = {}
    gap_frames = int(round(_SLOT_GAP_S * frame_rate))
    cursor = 0
    next_track_id = 1
    trajectories: list[Trajectory] = []
    labels: dict[str, str] = {}
    x0, x1, y0, y1 = extent

    for t_idx, name in enumerate(ordered_names):
        template, count = requested[name]
        for i_idx in range(count):
            rng = np.random.default_rng(np.random.SeedSequence([seed, t_idx, i_idx]))
            drafts = _realize_instance(template, rng, frame_rate, conflict_cache)
            for d in drafts:
                if d.x.min() < x0 or d.x.max() > x1 or d.y.min() < y0 or d.y.max() > y1:
                    raise GenerationError(
                        f"template {template.name!r} leaves the background extent"
                    )
            ids = {}
            instance_end = cursor
            for d in drafts:
                d.start_frame += cursor
                track = _finalize_track(next_track_id, d, frame_rate)
                ids[d.role] = next_track_id
                next_track_id += 1
                trajectories.append(track)
                instance_end = max(instance_end, int(track.frames[-1]))
            cursor = instance_end + 1 + gap_frames
            if "challenger" in ids:
                labels[scenario_key(recording_id, ids["ego"], ids["challenger"])] = template.name
                if template.challenger_class in VEHICLE_CLASSES:
                    labels[scenario_key(recording_id, ids["challenger"], ids["ego"])] = template.name

    rec = Recording(
        recording_id=recording_id,
        frame_rate=frame_rate,
        trajectories=tuple(trajectories),
        background_extent=extent,
        traffic_space_name="synthetic-intersection",
    )
    return rec, GroundTruth(labels=labels)
