"""Trajectory data model, resampling, finite-difference velocities and I/O.

A trajectory is a sequence of 2-D positions sampled at a fixed time step.
Datasets are stored as JSON lines, one trajectory per line:

    {"id": "...", "dt": 0.5, "points": [[t, x, y], ...]}
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TrajectoryError",
    "Trajectory",
    "Dataset",
    "resample",
    "velocities",
    "split_horizon",
    "load_dataset",
    "save_dataset",
]

_TIME_TOL = 1e-6


class TrajectoryError(ValueError):
    """Raised for trajectories too short or irregular for an operation."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled 2-D track: timestamps ``times`` and positions ``xy``.

    ``intent`` is an optional ground-truth label attached by the synthetic
    generator; it is carried in memory only and never serialized.
    """

    id: str
    dt: float
    times: np.ndarray
    xy: np.ndarray
    intent: str | None = field(default=None)

    def __post_init__(self):
        if self.dt <= 0:
            raise TrajectoryError(f"dt must be positive, got {self.dt}")
        times = np.asarray(self.times, dtype=float).copy()
        xy = np.asarray(self.xy, dtype=float).reshape(-1, 2).copy()
        if times.shape != (len(xy),):
            raise TrajectoryError("times and xy lengths differ")
        if len(times) >= 2:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise TrajectoryError(f"timestamps of {self.id!r} are not strictly increasing")
            if np.any(np.abs(steps - self.dt) > _TIME_TOL):
                raise TrajectoryError(f"timestamps of {self.id!r} deviate from dt={self.dt}")
        times.setflags(write=False)
        xy.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "xy", xy)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        """Elapsed seconds between first and last sample (0 if < 2 points)."""
        return float(self.times[-1] - self.times[0]) if len(self) >= 2 else 0.0

    @property
    def points(self) -> np.ndarray:
        """(n, 3) array of rows (t, x, y)."""
        return np.column_stack((self.times, self.xy))

    @classmethod
    def from_points(cls, id: str, dt: float, points, intent: str | None = None) -> "Trajectory":
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        return cls(id=id, dt=dt, times=pts[:, 0], xy=pts[:, 1:], intent=intent)


@dataclass(eq=False)
class Dataset:
    """A bag of trajectories sharing one sampling interval.

    ``frame`` is the curbside frame of the intersection the data came from,
    when known; the on-disk format carries trajectories only.
    """

    trajectories: list
    frame: object | None = None
    tag: str = "train"

    def __post_init__(self):
        dts = {t.dt for t in self.trajectories}
        if len(dts) > 1:
            raise TrajectoryError(f"trajectories mix sampling intervals: {sorted(dts)}")

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)

    @property
    def dt(self) -> float:
        if not self.trajectories:
            raise TrajectoryError("empty dataset has no dt")
        return self.trajectories[0].dt


def resample(traj: Trajectory, dt: float) -> Trajectory:
    """Linearly interpolate onto a uniform grid starting at the first timestamp.

    The grid runs to the last timestamp; a trailing partial step is dropped.
    """
    if dt <= 0:
        raise TrajectoryError(f"dt must be positive, got {dt}")
    if len(traj) < 2:
        raise TrajectoryError(f"cannot resample {traj.id!r}: needs at least 2 points")
    t0 = traj.times[0]
    span = traj.times[-1] - t0
    n_steps = int(np.floor(span / dt + 1e-9))
    grid = t0 + dt * np.arange(n_steps + 1)
    x = np.interp(grid, traj.times, traj.xy[:, 0])
    y = np.interp(grid, traj.times, traj.xy[:, 1])
    return Trajectory(id=traj.id, dt=dt, times=grid, xy=np.column_stack((x, y)), intent=traj.intent)


def velocities(traj: Trajectory) -> np.ndarray:
    """Forward-difference velocity samples, one per point except the last.

    Returns an (n-1, 4) array of rows ``(x, y, vx, vy)`` where the velocity
    at point k is ``(p[k+1] - p[k]) / dt``.
    """
    if len(traj) < 2:
        raise TrajectoryError(f"{traj.id!r} has fewer than 2 points, no velocities")
    v = np.diff(traj.xy, axis=0) / traj.dt
    return np.hstack((traj.xy[:-1], v))


def split_horizon(traj: Trajectory, t_obs: float, t_pred: float) -> tuple[Trajectory, Trajectory]:
    """Split into the first ``t_obs`` seconds and the following ``t_pred`` seconds."""
    n_obs = int(round(t_obs / traj.dt))
    n_pred = int(round(t_pred / traj.dt))
    if n_obs + n_pred > len(traj):
        raise TrajectoryError(
            f"{traj.id!r} has {len(traj)} points, needs {n_obs + n_pred} "
            f"for t_obs={t_obs}s + t_pred={t_pred}s at dt={traj.dt}s"
        )
    observed = Trajectory(
        id=traj.id, dt=traj.dt, times=traj.times[:n_obs], xy=traj.xy[:n_obs], intent=traj.intent
    )
    future = Trajectory(
        id=traj.id,
        dt=traj.dt,
        times=traj.times[n_obs : n_obs + n_pred],
        xy=traj.xy[n_obs : n_obs + n_pred],
        intent=traj.intent,
    )
    return observed, future


def load_dataset(path, frame=None, tag: str = "train") -> Dataset:
    """Read a JSON-lines dataset file."""
    trajectories = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                trajectories.append(Trajectory.from_points(rec["id"], rec["dt"], rec["points"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad trajectory record: {exc}") from exc
    return Dataset(trajectories=trajectories, frame=frame, tag=tag)


def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset as JSON lines."""
    with open(path, "w") as fh:
        for traj in dataset:
            rec = {"id": traj.id, "dt": traj.dt, "points": traj.points.tolist()}
            fh.write(json.dumps(rec) + "\n")
