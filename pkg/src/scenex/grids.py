"""Scenario-grid feature extraction.

Each accepted scenario is rendered into a small stack of ego-relative
grid channels (the scenario tensor): an occupancy channel holding the ego
trace, the challenger trace, and the key-frame footprints of surrounding
road users, plus velocity and acceleration channels in both grid axes.
The tensor is anchored at the ego pose of the key frame, which is the
frame where ego or challenger reaches its maximum absolute yaw rate.

Ego-relative positions and rotated vector components are quantized to
0.1 mm (1e-4) before binning and storage. The true values are invariant
under a rigid motion of the world frame; quantization removes the last
floating-point wobble of the transform chain, so tensors built from a
rotated and translated copy of a recording are bit-identical to the
originals.

Flattened tensors are standardized, reduced with PCA, and stacked into
the cluster input matrix consumed by the clustering stage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scenex import numerics
from scenex.petfilter import ConcreteScenario
from scenex.trajectory import Trajectory

CHANNELS = ("occupancy", "vx", "vy", "ax", "ay")

OCC_EGO = 1.0
OCC_CHALLENGER = 0.75
OCC_OTHER = 0.5

_OCC_VALUES = (0.0, OCC_OTHER, OCC_CHALLENGER, OCC_EGO)

#: Grid channel that carries the information of each motion feature.
#: Position and heading fold into occupancy; body-frame (lon/lat) and
#: world-frame velocity/acceleration components map to the same
#: ego-frame component grids.
CHANNEL_FOR_FEATURE = {
    "xCenter": "occupancy",
    "yCenter": "occupancy",
    "heading": "occupancy",
    "xVelocity": "vx",
    "yVelocity": "vy",
    "xAcceleration": "ax",
    "yAcceleration": "ay",
    "lonVelocity": "vx",
    "latVelocity": "vy",
    "lonAcceleration": "ax",
    "latAcceleration": "ay",
}

_DECIMALS = 4


def channels_for_features(feature_names) -> tuple[str, ...]:
    """Channel set implied by a list of motion feature names."""
    chosen = set()
    for name in feature_names:
        if name not in CHANNEL_FOR_FEATURE:
            raise ValueError(f"no grid channel is defined for feature {name!r}")
        chosen.add(CHANNEL_FOR_FEATURE[name])
    return tuple(c for c in CHANNELS if c in chosen)


@dataclass(frozen=True)
class GridParams:
    """Region of interest, resolution, and channel selection.

    ``a_gr`` is the side length of the square region of interest in
    meters; ``r_gr`` holds cells per meter along the ego heading axis
    (rows) and the lateral axis (columns). Both products a_gr*r must be
    integral. ``include_others_dynamics`` additionally writes the traces
    of surrounding road users into the dynamic channels (off by default;
    they always contribute key-frame footprints to occupancy).
    """

    a_gr: float = 30.0
    r_gr: tuple[float, float] = (1.0, 1.0)
    channels: tuple[str, ...] = CHANNELS
    include_others_dynamics: bool = False

    def __post_init__(self):
        if self.a_gr <= 0.0:
            raise ValueError("a_gr must be positive")
        r1, r2 = self.r_gr
        if r1 <= 0.0 or r2 <= 0.0:
            raise ValueError("grid resolutions must be positive")
        for r in (r1, r2):
            cells = self.a_gr * r
            if abs(cells - round(cells)) > 1e-9:
                raise ValueError("a_gr times each resolution must be integral")
        if not self.channels:
            raise ValueError("at least one channel is required")
        if len(set(self.channels)) != len(self.channels):
            raise ValueError("duplicate channel name")
        for c in self.channels:
            if c not in CHANNELS:
                raise ValueError(f"unknown channel {c!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (
            int(round(self.a_gr * self.r_gr[0])),
            int(round(self.a_gr * self.r_gr[1])),
        )


@dataclass(frozen=True)
class KeyFrame:
    """Anchor frame of a scenario tensor.

    ``source`` says whose yaw-rate maximum was larger; when the
    challenger wins but its frame lies outside the ego lifetime, the ego
    pose is taken at the nearest ego frame and ``clamped`` is set.
    """

    frame: int
    source: str
    ego_pose: tuple[float, float, float]
    clamped: bool = False


@dataclass(frozen=True)
class ScenarioTensor:
    """Multi-channel ego-relative grid stack for one scenario."""

    scenario_id: str
    channels: tuple[np.ndarray, ...]
    channel_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.channels) != len(self.channel_names):
            raise ValueError("channel count does not match channel names")
        if not self.channels:
            raise ValueError("tensor needs at least one channel")
        shape = self.channels[0].shape
        for name, g in zip(self.channel_names, self.channels):
            if g.shape != shape:
                raise ValueError("all channels must share one shape")
            if not np.all(np.isfinite(g)):
                raise ValueError(f"channel {name!r} has non-finite values")
            if name == "occupancy" and not np.isin(g, _OCC_VALUES).all():
                raise ValueError("occupancy values must be 0, 0.5, 0.75 or 1.0")
            g.setflags(write=False)


@dataclass(frozen=True)
class ClusterInputMatrix:
    """PCA-reduced scenario-grid rows, one per scenario, sorted by id.

    ``kept_pixels`` are the flat pixel indices that carried variance and
    entered the PCA; ``pca_model`` is None only in the degenerate case
    where no pixel varied (rows are then a single zero column).
    """

    rows: np.ndarray
    row_ids: tuple[str, ...]
    pca_model: numerics.PcaModel | None
    kept_pixels: tuple[int, ...] = field(default=(), repr=False)


def yaw_rate(heading: np.ndarray, frame_rate: float) -> np.ndarray:
    """Smoothed heading derivative in rad/s.

    Central finite differences (one-sided at the ends) on the unwrapped
    heading, then a centered 5-sample moving average whose window clips
    at the series ends.
    """
    h = np.asarray(heading, dtype=float)
    if h.ndim != 1 or h.shape[0] < 2:
        raise ValueError("need at least two heading samples")
    if frame_rate <= 0.0:
        raise ValueError("frame rate must be positive")
    raw = np.gradient(np.unwrap(h)) * frame_rate
    n = raw.shape[0]
    csum = np.concatenate(([0.0], np.cumsum(raw)))
    idx = np.arange(n)
    lo = np.maximum(idx - 2, 0)
    hi = np.minimum(idx + 2, n - 1)
    return (csum[hi + 1] - csum[lo]) / (hi - lo + 1)


def _max_abs_yaw(traj: Trajectory, frame_rate: float) -> tuple[float, int]:
    """Largest |yaw rate| and the frame where it occurs (first on ties).

    The rate is quantized to a microradian grid before the argmax:
    constant-curvature stretches produce plateaus that differ only at
    ulp scale, and a rigid motion of the whole recording perturbs
    headings at that scale, so without the rounding the chosen frame
    would wander along the plateau.
    """
    if len(traj) < 2:
        return 0.0, int(traj.frames[0])
    rate = np.round(np.abs(yaw_rate(traj.heading, frame_rate)), 6)
    i = int(np.argmax(rate))
    return float(rate[i]), int(traj.frames[i])


def key_frame(s: ConcreteScenario, frame_rate: float) -> KeyFrame:
    """Locate the yaw-rate maximum of the encounter (ties favor the ego)."""
    ego_max, ego_frame = _max_abs_yaw(s.ego, frame_rate)
    ch_max, ch_frame = _max_abs_yaw(s.challenger, frame_rate)
    if ego_max >= ch_max:
        frame, source, clamped = ego_frame, "ego", False
        idx = s.ego.index_of(frame)
    else:
        frame, source = ch_frame, "challenger"
        f0, f1 = s.ego.frame_range
        if frame < f0:
            idx, clamped = 0, True
        elif frame > f1:
            idx, clamped = len(s.ego) - 1, True
        else:
            idx, clamped = s.ego.index_of(frame), False
    pose = (float(s.ego.x[idx]), float(s.ego.y[idx]), float(s.ego.heading[idx]))
    return KeyFrame(frame=int(frame), source=source, ego_pose=pose, clamped=clamped)


def to_ego_frame(ego_pose, point):
    """World point(s) -> ego-relative coordinates (x ahead, y left)."""
    px, py, ph = ego_pose
    c = math.cos(ph)
    s = math.sin(ph)
    dx = np.asarray(point[0]) - px
    dy = np.asarray(point[1]) - py
    return dx * c + dy * s, -dx * s + dy * c


def rotate_to_ego(ego_heading: float, vector):
    """World vector(s) -> ego-frame components (rotation only)."""
    c = math.cos(ego_heading)
    s = math.sin(ego_heading)
    vx = np.asarray(vector[0])
    vy = np.asarray(vector[1])
    return vx * c + vy * s, -vx * s + vy * c


class _Raster:
    """Mutable grid stack being painted; write order encodes priority."""

    def __init__(self, kf: KeyFrame, p: GridParams):
        self.h, self.w = p.shape
        self.half = p.a_gr / 2.0
        self.r1, self.r2 = p.r_gr
        self.pose = kf.ego_pose
        self.grids = {c: np.zeros((self.h, self.w)) for c in p.channels}

    def bin_points(self, x, y):
        """Quantized ego-relative binning; returns rows, cols, inside-mask."""
        xr, yr = to_ego_frame(self.pose, (x, y))
        xr = np.round(xr, _DECIMALS)
        yr = np.round(yr, _DECIMALS)
        u = np.floor((self.half - xr) * self.r1)
        v = np.floor((self.half - yr) * self.r2)
        mask = (u >= 0) & (u < self.h) & (v >= 0) & (v < self.w)
        return u.astype(int), v.astype(int), mask

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.half - (row + 0.5) / self.r1,
            self.half - (col + 0.5) / self.r2,
        )

    def paint_trace(self, traj: Trajectory, occ_value: float | None):
        """Paint one trajectory: occupancy by max, dynamics last-pass-wins."""
        rows, cols, mask = self.bin_points(traj.x, traj.y)
        values = {}
        for name in self.grids:
            if name == "occupancy":
                continue
            if name in ("vx", "vy"):
                comp = rotate_to_ego(self.pose[2], (traj.x_vel, traj.y_vel))
            else:
                comp = rotate_to_ego(self.pose[2], (traj.x_acc, traj.y_acc))
            values[name] = np.round(comp[0] if name in ("vx", "ax") else comp[1], _DECIMALS)
        occ = self.grids.get("occupancy")
        for k in range(rows.shape[0]):
            if not mask[k]:
                continue
            r, c = rows[k], cols[k]
            if occ is not None and occ_value is not None:
                occ[r, c] = max(occ[r, c], occ_value)
            for name, vals in values.items():
                self.grids[name][r, c] = vals[k]

    def paint_footprint(self, traj: Trajectory, idx: int):
        """0.5-valued occupancy cells under an oriented footprint rectangle."""
        occ = self.grids.get("occupancy")
        if occ is None:
            return
        xr, yr = to_ego_frame(self.pose, (traj.x[idx], traj.y[idx]))
        xr = float(np.round(xr, _DECIMALS))
        yr = float(np.round(yr, _DECIMALS))
        theta = float(np.round(traj.heading[idx] - self.pose[2], _DECIMALS))
        ct, st = math.cos(theta), math.sin(theta)
        half_len = traj.length / 2.0
        half_wid = traj.width / 2.0
        radius = math.hypot(half_len, half_wid)
        row_a = int(np.floor((self.half - (xr + radius)) * self.r1))
        row_b = int(np.floor((self.half - (xr - radius)) * self.r1))
        col_a = int(np.floor((self.half - (yr + radius)) * self.r2))
        col_b = int(np.floor((self.half - (yr - radius)) * self.r2))
        hit = False
        for row in range(max(row_a, 0), min(row_b, self.h - 1) + 1):
            for col in range(max(col_a, 0), min(col_b, self.w - 1) + 1):
                xc, yc = self.cell_center(row, col)
                lon = (xc - xr) * ct + (yc - yr) * st
                lat = -(xc - xr) * st + (yc - yr) * ct
                if abs(lon) <= half_len + 1e-9 and abs(lat) <= half_wid + 1e-9:
                    occ[row, col] = max(occ[row, col], OCC_OTHER)
                    hit = True
        if not hit:
            rows, cols, mask = self.bin_points(
                np.asarray([traj.x[idx]]), np.asarray([traj.y[idx]])
            )
            if mask[0]:
                r, c = rows[0], cols[0]
                occ[r, c] = max(occ[r, c], OCC_OTHER)


def rasterize(s: ConcreteScenario, kf: KeyFrame, p: GridParams) -> ScenarioTensor:
    """Render one scenario into its ego-relative grid stack.

    Surrounding road users leave key-frame footprints in occupancy (and,
    with ``include_others_dynamics``, trace samples in the dynamic
    channels); the challenger trace is painted next and the ego trace
    last, so ego samples take priority on shared cells.
    """
    raster = _Raster(kf, p)
    for other in s.others:
        if p.include_others_dynamics:
            raster.paint_trace(other, occ_value=None)
        f0, f1 = other.frame_range
        if f0 <= kf.frame <= f1:
            raster.paint_footprint(other, other.index_of(kf.frame))
    raster.paint_trace(s.challenger, OCC_CHALLENGER)
    raster.paint_trace(s.ego, OCC_EGO)
    return ScenarioTensor(
        scenario_id=s.scenario_id,
        channels=tuple(raster.grids[c] for c in p.channels),
        channel_names=tuple(p.channels),
    )


def build_tensor(s: ConcreteScenario, p: GridParams) -> tuple[KeyFrame, ScenarioTensor]:
    kf = key_frame(s, s.frame_rate)
    return kf, rasterize(s, kf, p)


def flatten(t: ScenarioTensor) -> np.ndarray:
    """Channels side by side, then read column by column."""
    return np.ravel(np.hstack(t.channels), order="F")


def unflatten(vec: np.ndarray, height: int, width: int, n_channels: int) -> tuple[np.ndarray, ...]:
    """Inverse of :func:`flatten` for a known tensor shape."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (height * width * n_channels,):
        raise ValueError("vector length does not match the tensor shape")
    wide = v.reshape((height, width * n_channels), order="F")
    return tuple(wide[:, i * width : (i + 1) * width].copy() for i in range(n_channels))


def cluster_input_from_tensors(tensors, var_pca: float = 0.99) -> ClusterInputMatrix:
    """Stack flattened tensors, drop dead pixels, reduce with PCA.

    Rows follow sorted scenario_id order. When every pixel is constant
    across scenarios, the rows degenerate to a single zero column (all
    scenarios identical; they still cluster together at distance zero).
    """
    ordered = sorted(tensors, key=lambda t: t.scenario_id)
    if len(ordered) < 2:
        raise ValueError("clustering input needs at least two scenarios")
    ids = [t.scenario_id for t in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate scenario_id in cluster input")
    stacked = np.vstack([flatten(t) for t in ordered])
    stds = stacked.std(axis=0)
    kept = np.flatnonzero(stds > 0.0)
    if kept.size == 0:
        return ClusterInputMatrix(
            rows=np.zeros((len(ids), 1)),
            row_ids=tuple(ids),
            pca_model=None,
            kept_pixels=(),
        )
    rows, model = numerics.pca_reduce(stacked[:, kept], var_pca)
    return ClusterInputMatrix(
        rows=rows,
        row_ids=tuple(ids),
        pca_model=model,
        kept_pixels=tuple(int(k) for k in kept),
    )


def build_cluster_input(
    scenarios,
    gp: GridParams,
    var_pca: float = 0.99,
    keyframes: dict | None = None,
) -> ClusterInputMatrix:
    """Tensor construction plus :func:`cluster_input_from_tensors`.

    ``keyframes``, if given a dict, receives the KeyFrame chosen for each
    scenario id.
    """
    tensors = []
    for s in scenarios:
        kf, tensor = build_tensor(s, gp)
        if keyframes is not None:
            keyframes[s.scenario_id] = kf
        tensors.append(tensor)
    return cluster_input_from_tensors(tensors, var_pca)


def tensor_to_dict(t: ScenarioTensor) -> dict:
    h, w = t.channels[0].shape
    return {
        "scenario_id": t.scenario_id,
        "height": h,
        "width": w,
        "channel_names": list(t.channel_names),
        "channels": {
            name: [[float(v) for v in row] for row in grid]
            for name, grid in zip(t.channel_names, t.channels)
        },
    }


def tensor_from_dict(obj: dict) -> ScenarioTensor:
    names = tuple(obj["channel_names"])
    grids = tuple(np.asarray(obj["channels"][n], dtype=float) for n in names)
    return ScenarioTensor(scenario_id=obj["scenario_id"], channels=grids, channel_names=names)


def export_tensor_png(t: ScenarioTensor, out_dir) -> list[str]:
    """Write one grayscale PNG per channel for visual inspection.

    Occupancy maps its native [0, 1] range; dynamic channels are min-max
    scaled per image, so pixel values are comparable only within one file.
    """
    from pathlib import Path

    from PIL import Image

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, grid in zip(t.channel_names, t.channels):
        if name == "occupancy":
            scaled = grid * 255.0
        else:
            lo = float(grid.min())
            hi = float(grid.max())
            scaled = np.zeros_like(grid) if hi <= lo else (grid - lo) / (hi - lo) * 255.0
        img = Image.fromarray(np.round(scaled).astype(np.uint8), mode="L")
        path = out / f"{t.scenario_id}_{name}.png"
        img.save(path)
        paths.append(str(path))
    return paths
