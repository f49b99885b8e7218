"""Trajectory data model and recording ingestion.

A recording follows the drone-dataset convention of three CSV files: a
tracks file with one motion row per (track, frame), a track metadata file
with the road-user class and footprint, and a recording metadata file.
Exact headers, delimiters, and units are pinned in docs/file_formats.md.
Headings are degrees in the files and radians in (-pi, pi] internally;
frames within a track must be strictly consecutive - gaps are rejected,
never interpolated.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from scenex.errors import IntegrityError, SchemaError

CAR = "car"
TRUCK_BUS = "truck_bus"
PEDESTRIAN = "pedestrian"
BICYCLE = "bicycle"

#: Closed set of road-user classes; "vehicles" means car or truck_bus.
RU_CLASSES = (CAR, TRUCK_BUS, PEDESTRIAN, BICYCLE)
VEHICLE_CLASSES = (CAR, TRUCK_BUS)

#: The eleven per-frame motion features, in pinned column order.
MOTION_COLUMNS = (
    "xCenter",
    "yCenter",
    "heading",
    "xVelocity",
    "yVelocity",
    "xAcceleration",
    "yAcceleration",
    "lonVelocity",
    "latVelocity",
    "lonAcceleration",
    "latAcceleration",
)
TRACKS_COLUMNS = ("trackId", "frame") + MOTION_COLUMNS
TRACKS_META_COLUMNS = ("trackId", "class", "width", "length", "initialFrame", "finalFrame", "numFrames")
RECORDING_META_REQUIRED = ("recordingId", "frameRate")


def wrap_heading(h):
    """Wrap angles into (-pi, pi]."""
    w = np.mod(np.asarray(h, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    if w.ndim == 0:
        return float(np.pi) if w == -np.pi else float(w)
    w[w == -np.pi] = np.pi
    return w


@dataclass(frozen=True)
class TrackPoint:
    """One observed state of a road user at a frame."""

    frame: int
    x_center: float
    y_center: float
    heading: float
    x_velocity: float
    y_velocity: float
    x_acceleration: float
    y_acceleration: float
    lon_velocity: float
    lat_velocity: float
    lon_acceleration: float
    lat_acceleration: float


@dataclass(frozen=True)
class Trajectory:
    """The full observed life of one road user, stored as column arrays.

    Frames are strictly consecutive integers. ``width``/``length`` describe
    the footprint in meters; both must be positive for vehicles and may be
    zero for pedestrians (point occupants).
    """

    track_id: int
    ru_class: str
    width: float
    length: float
    frames: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    x_vel: np.ndarray
    y_vel: np.ndarray
    x_acc: np.ndarray
    y_acc: np.ndarray
    lon_vel: np.ndarray
    lat_vel: np.ndarray
    lon_acc: np.ndarray
    lat_acc: np.ndarray

    def __post_init__(self):
        if self.ru_class not in RU_CLASSES:
            raise SchemaError(f"unknown road-user class {self.ru_class!r}")
        n = self.frames.shape[0]
        if n == 0:
            raise IntegrityError(f"track {self.track_id}: empty trajectory")
        for name in _ARRAY_FIELDS:
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise IntegrityError(f"track {self.track_id}: column {name} has wrong length")
            if name != "frames" and not np.isfinite(arr).all():
                raise IntegrityError(f"track {self.track_id}: non-finite value in {name}")
            arr.flags.writeable = False
        if n > 1 and not (np.diff(self.frames) == 1).all():
            raise IntegrityError(f"track {self.track_id}: frames are not strictly consecutive")
        if int(self.frames[0]) < 0:
            raise IntegrityError(f"track {self.track_id}: negative frame index")
        if self.ru_class in VEHICLE_CLASSES and (self.width <= 0.0 or self.length <= 0.0):
            raise IntegrityError(f"track {self.track_id}: vehicle footprint must be positive")
        if self.width < 0.0 or self.length < 0.0:
            raise IntegrityError(f"track {self.track_id}: negative footprint")

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    @property
    def frame_range(self) -> tuple[int, int]:
        """Inclusive (first, last) frame of the track."""
        return int(self.frames[0]), int(self.frames[-1])

    def index_of(self, frame: int) -> int:
        first, last = self.frame_range
        if not first <= frame <= last:
            raise KeyError(f"frame {frame} outside track {self.track_id} lifetime [{first}, {last}]")
        return int(frame - first)

    def slice_frames(self, f0: int, f1: int) -> "Trajectory":
        """Sub-trajectory over the inclusive frame window [f0, f1]."""
        a = self.index_of(f0)
        b = self.index_of(f1)
        if b < a:
            raise ValueError("empty frame window")
        sl = slice(a, b + 1)
        return Trajectory(
            track_id=self.track_id,
            ru_class=self.ru_class,
            width=self.width,
            length=self.length,
            **{name: getattr(self, name)[sl].copy() for name in _ARRAY_FIELDS},
        )

    def motion_matrix(self) -> np.ndarray:
        """(n, 11) matrix of the motion features in MOTION_COLUMNS order."""
        return np.column_stack([getattr(self, _COLUMN_FIELDS[c]) for c in MOTION_COLUMNS])

    @property
    def points(self) -> list[TrackPoint]:
        """Row view of the trajectory (convenience, not the hot path)."""
        return [
            TrackPoint(
                frame=int(self.frames[i]),
                x_center=float(self.x[i]),
                y_center=float(self.y[i]),
                heading=float(self.heading[i]),
                x_velocity=float(self.x_vel[i]),
                y_velocity=float(self.y_vel[i]),
                x_acceleration=float(self.x_acc[i]),
                y_acceleration=float(self.y_acc[i]),
                lon_velocity=float(self.lon_vel[i]),
                lat_velocity=float(self.lat_vel[i]),
                lon_acceleration=float(self.lon_acc[i]),
                lat_acceleration=float(self.lat_acc[i]),
            )
            for i in range(len(self))
        ]


_ARRAY_FIELDS = (
    "frames",
    "x",
    "y",
    "heading",
    "x_vel",
    "y_vel",
    "x_acc",
    "y_acc",
    "lon_vel",
    "lat_vel",
    "lon_acc",
    "lat_acc",
)

#: tracks.csv column -> Trajectory array field.
_COLUMN_FIELDS = {
    "xCenter": "x",
    "yCenter": "y",
    "heading": "heading",
    "xVelocity": "x_vel",
    "yVelocity": "y_vel",
    "xAcceleration": "x_acc",
    "yAcceleration": "y_acc",
    "lonVelocity": "lon_vel",
    "latVelocity": "lat_vel",
    "lonAcceleration": "lon_acc",
    "latAcceleration": "lat_acc",
}


@dataclass(frozen=True)
class Recording:
    """One recorded traffic space: all trajectories plus metadata."""

    recording_id: str
    frame_rate: float
    trajectories: tuple[Trajectory, ...]
    background_extent: tuple[float, float, float, float]
    traffic_space_name: str = ""

    def __post_init__(self):
        if self.frame_rate <= 0.0:
            raise IntegrityError("frame rate must be positive")
        ids = [t.track_id for t in self.trajectories]
        if len(ids) != len(set(ids)):
            raise IntegrityError("duplicate track ids in recording")
        x0, x1, y0, y1 = self.background_extent
        if x1 < x0 or y1 < y0:
            raise IntegrityError("degenerate background extent")

    def by_id(self, track_id: int) -> Trajectory:
        for t in self.trajectories:
            if t.track_id == track_id:
                return t
        raise KeyError(f"track {track_id} not in recording {self.recording_id}")

    def class_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in RU_CLASSES}
        for t in self.trajectories:
            counts[t.ru_class] += 1
        return counts


def ego_candidates(rec: Recording) -> list[Trajectory]:
    """Tracks eligible as ego: class `car`, in recording order."""
    return [t for t in rec.trajectories if t.ru_class == CAR]


def _read_csv(source, name: str) -> pd.DataFrame:
    try:
        return pd.read_csv(source, float_precision="round_trip")
    except Exception as exc:
        raise SchemaError(f"{name}: unreadable CSV ({exc})") from exc


def _require_columns(df: pd.DataFrame, required, name: str):
    for col in required:
        if col not in df.columns:
            raise SchemaError(f"{name}: missing required column {col!r}")


def parse_recording(tracks, tracks_meta, recording_meta) -> Recording:
    """Parse the three recording CSV streams into a validated Recording.

    Accepts file paths or binary/text streams. Raises SchemaError for
    missing columns or unknown classes and IntegrityError for structural
    violations (frame gaps, meta/track mismatches, non-finite values).
    """
    tdf = _read_csv(tracks, "tracks")
    mdf = _read_csv(tracks_meta, "tracksMeta")
    rdf = _read_csv(recording_meta, "recordingMeta")
    _require_columns(tdf, TRACKS_COLUMNS, "tracks")
    _require_columns(mdf, ("trackId", "class", "width", "length"), "tracksMeta")
    _require_columns(rdf, RECORDING_META_REQUIRED, "recordingMeta")
    if len(rdf) != 1:
        raise SchemaError("recordingMeta: expected exactly one row")

    rmeta = rdf.iloc[0]
    recording_id = str(rmeta["recordingId"])
    frame_rate = float(rmeta["frameRate"])
    name = str(rmeta["locationName"]) if "locationName" in rdf.columns else ""

    meta_ids = mdf["trackId"].to_numpy()
    if len(set(meta_ids.tolist())) != len(meta_ids):
        raise IntegrityError("tracksMeta: duplicate track ids")

    tdf = tdf.sort_values(["trackId", "frame"], kind="stable")
    grouped = {int(tid): grp for tid, grp in tdf.groupby("trackId", sort=True)}

    trajectories = []
    for row in mdf.to_dict("records"):
        tid = int(row["trackId"])
        ru_class = str(row["class"])
        if ru_class not in RU_CLASSES:
            raise SchemaError(f"tracksMeta: unknown class {ru_class!r} for track {tid}")
        grp = grouped.pop(tid, None)
        if grp is None:
            raise IntegrityError(f"tracksMeta: track {tid} has no rows in tracks")
        frames = grp["frame"].to_numpy(dtype=np.int64)
        arrays = {"frames": frames}
        for col, fieldname in _COLUMN_FIELDS.items():
            values = grp[col].to_numpy(dtype=np.float64)
            if col == "heading":
                values = wrap_heading(np.deg2rad(values))
            arrays[fieldname] = values
        if "initialFrame" in mdf.columns:
            if int(row["initialFrame"]) != int(frames[0]) or int(row["finalFrame"]) != int(frames[-1]):
                raise IntegrityError(f"tracksMeta: frame bounds disagree with tracks for track {tid}")
        trajectories.append(
            Trajectory(
                track_id=tid,
                ru_class=ru_class,
                width=float(row["width"]),
                length=float(row["length"]),
                **arrays,
            )
        )
    if grouped:
        stray = sorted(grouped)[0]
        raise IntegrityError(f"tracks: track {stray} has motion rows but no tracksMeta entry")

    extent_cols = ("xMin", "xMax", "yMin", "yMax")
    if all(c in rdf.columns for c in extent_cols):
        extent = tuple(float(rmeta[c]) for c in extent_cols)
    else:
        if trajectories:
            xs = np.concatenate([t.x for t in trajectories])
            ys = np.concatenate([t.y for t in trajectories])
            extent = (float(xs.min()), float(xs.max()), float(ys.min()), float(ys.max()))
        else:
            extent = (0.0, 0.0, 0.0, 0.0)

    return Recording(
        recording_id=recording_id,
        frame_rate=frame_rate,
        trajectories=tuple(trajectories),
        background_extent=extent,
        traffic_space_name=name,
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def serialize_recording(rec: Recording) -> tuple[str, str, str]:
    """Render a recording back into the three CSV texts.

    Float cells use shortest round-trip repr, so serialize -> parse is the
    identity up to heading unit conversion (< 1e-12 rad)."""
    lines = [",".join(TRACKS_COLUMNS)]
    for t in sorted(rec.trajectories, key=lambda t: t.track_id):
        heading_deg = np.rad2deg(t.heading)
        cols = (t.x, t.y, heading_deg, t.x_vel, t.y_vel, t.x_acc, t.y_acc, t.lon_vel, t.lat_vel, t.lon_acc, t.lat_acc)
        for i in range(len(t)):
            cells = [str(t.track_id), str(int(t.frames[i]))]
            cells.extend(_fmt(col[i]) for col in cols)
            lines.append(",".join(cells))
    tracks_csv = "\n".join(lines) + "\n"

    lines = [",".join(TRACKS_META_COLUMNS)]
    for t in sorted(rec.trajectories, key=lambda t: t.track_id):
        first, last = t.frame_range
        lines.append(
            ",".join(
                [str(t.track_id), t.ru_class, _fmt(t.width), _fmt(t.length), str(first), str(last), str(len(t))]
            )
        )
    meta_csv = "\n".join(lines) + "\n"

    x0, x1, y0, y1 = rec.background_extent
    rec_csv = (
        "recordingId,frameRate,locationName,xMin,xMax,yMin,yMax\n"
        + ",".join(
            [rec.recording_id, _fmt(rec.frame_rate), rec.traffic_space_name, _fmt(x0), _fmt(x1), _fmt(y0), _fmt(y1)]
        )
        + "\n"
    )
    return tracks_csv, meta_csv, rec_csv


def write_recording(rec: Recording, out_dir) -> dict[str, str]:
    """Write the three CSVs into ``out_dir``; returns the file paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    tracks_csv, meta_csv, rec_csv = serialize_recording(rec)
    paths = {
        "tracks": os.path.join(out_dir, "tracks.csv"),
        "tracks_meta": os.path.join(out_dir, "tracksMeta.csv"),
        "recording_meta": os.path.join(out_dir, "recordingMeta.csv"),
    }
    for key, text in (("tracks", tracks_csv), ("tracks_meta", meta_csv), ("recording_meta", rec_csv)):
        with io.open(paths[key], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return paths
