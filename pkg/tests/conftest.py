"""Shared builders for the test suite."""
from __future__ import annotations

import numpy as np

from scenex.trajectory import CAR, Recording, Trajectory


def make_traj(
    track_id,
    x,
    y,
    first_frame=0,
    heading=None,
    ru_class=CAR,
    width=2.0,
    length=4.5,
    frame_rate=25.0,
    **overrides,
):
    """Trajectory from a position series.

    Velocities and accelerations are derived by finite differences (matching
    how the synthetic generator produces them) unless overridden; a single
    sample gets zeros. ``heading`` may be a scalar or a per-frame array and
    defaults to zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    frames = first_frame + np.arange(n, dtype=np.int64)
    if heading is None:
        heading = np.zeros(n)
    else:
        heading = np.asarray(heading, dtype=np.float64)
        if heading.ndim == 0:
            heading = np.full(n, float(heading))
    if n >= 2:
        x_vel = np.gradient(x) * frame_rate
        y_vel = np.gradient(y) * frame_rate
        x_acc = np.gradient(x_vel) * frame_rate
        y_acc = np.gradient(y_vel) * frame_rate
    else:
        x_vel = y_vel = x_acc = y_acc = np.zeros(n)
    ch = np.cos(heading)
    sh = np.sin(heading)
    arrays = {
        "frames": frames,
        "x": x,
        "y": y,
        "heading": heading,
        "x_vel": x_vel,
        "y_vel": y_vel,
        "x_acc": x_acc,
        "y_acc": y_acc,
        "lon_vel": x_vel * ch + y_vel * sh,
        "lat_vel": -x_vel * sh + y_vel * ch,
        "lon_acc": x_acc * ch + y_acc * sh,
        "lat_acc": -x_acc * sh + y_acc * ch,
    }
    for key, value in overrides.items():
        arrays[key] = np.asarray(value, dtype=np.float64)
    arrays = {k: np.array(v, copy=True) for k, v in arrays.items()}
    arrays["frames"] = arrays["frames"].astype(np.int64)
    return Trajectory(
        track_id=track_id,
        ru_class=ru_class,
        width=width,
        length=length,
        **arrays,
    )


def make_recording(trajs, recording_id="rec0", frame_rate=25.0, extent=None, name="testspace"):
    if extent is None:
        xs = np.concatenate([t.x for t in trajs])
        ys = np.concatenate([t.y for t in trajs])
        extent = (
            float(xs.min()) - 1.0,
            float(xs.max()) + 1.0,
            float(ys.min()) - 1.0,
            float(ys.max()) + 1.0,
        )
    return Recording(
        recording_id=recording_id,
        frame_rate=frame_rate,
        trajectories=tuple(trajs),
        background_extent=extent,
        traffic_space_name=name,
    )


def random_walk_pair(rng, approach=True):
    """Two jittery trajectories that may or may not come close.

    With ``approach`` the second track crosses the first one's path, so the
    pair usually lands within filter range; without it the tracks stay far
    apart. Start frames differ so the common window is a proper subset.
    """
    n1 = int(rng.integers(30, 90))
    n2 = int(rng.integers(30, 90))
    f1 = int(rng.integers(0, 12))
    f2 = int(rng.integers(0, 12))
    x1 = np.cumsum(rng.normal(0.3, 0.1, size=n1))
    y1 = rng.normal(0.0, 0.2, size=n1)
    if approach:
        cross = float(rng.uniform(3.0, 12.0))
        x2 = np.full(n2, cross) + rng.normal(0.0, 0.15, size=n2)
        y2 = np.linspace(-6.0, 6.0, n2) + rng.normal(0.0, 0.1, size=n2)
    else:
        x2 = np.cumsum(rng.normal(0.3, 0.1, size=n2))
        y2 = np.full(n2, 40.0) + rng.normal(0.0, 0.2, size=n2)
    a = make_traj(1, x1, y1, first_frame=f1)
    b = make_traj(2, x2, y2, first_frame=f2)
    return a, b
