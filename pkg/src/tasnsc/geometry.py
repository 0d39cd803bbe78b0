"""Curbside coordinate frames and the affine map into contravariant components.

A curbside frame sits at an intersection corner with its two axes running
along the intersecting curbs. The curbs meet at an angle ``alpha`` which is
generally not 90 degrees, so the frame is a skewed (oblique) basis. A point
is expressed in that frame by its *contravariant* components ``(x', y')``,
the unique coefficients with ``x'*e1 + y'*e2`` equal to the displacement
from the corner.

The map from an orthogonal local frame into these components is affine: a
rigid motion that moves the corner to the origin and aligns ``e1`` with +x,
followed by the constant shear/scale matrix

    [[1, -1/tan(alpha)],
     [0,  1/sin(alpha)]]

which collapses to the identity when the curbs are orthogonal. Affinity is
what makes motion primitives learned at one intersection reusable at
another: collinearity, parallelism and distance ratios survive the map.
"""

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateFrameError",
    "CurbsideFrame",
    "AffineMap2D",
    "frame_from_curbs",
    "identity_frame",
    "curbside_transform",
    "to_curbside",
    "from_curbside",
    "transform_trajectory",
    "load_frame",
    "frame_to_config",
]

_MIN_DIR_NORM = 1e-9
_MIN_SIN_ALPHA = 1e-6


class DegenerateFrameError(ValueError):
    """Raised when curb directions are too short or (anti)parallel."""


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (2,):
        raise ValueError(f"expected a 2-D point, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class CurbsideFrame:
    """Intersection corner plus unit vectors along the two curbs.

    ``origin``, ``e1`` and ``e2`` are expressed in the local frame of the
    intersection. ``alpha = arccos(e1 . e2)`` is the curb angle in radians,
    strictly inside (0, pi).
    """

    origin: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    alpha: float

    def __post_init__(self):
        for name in ("origin", "e1", "e2"):
            v = _as_point(getattr(self, name)).copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if abs(np.linalg.norm(self.e1) - 1.0) > 1e-12 or abs(np.linalg.norm(self.e2) - 1.0) > 1e-12:
            raise DegenerateFrameError("curb axes must be unit vectors")
        if not 0.0 < self.alpha < np.pi:
            raise DegenerateFrameError(f"curb angle {self.alpha} outside (0, pi)")

    @property
    def basis(self) -> np.ndarray:
        """2x2 matrix with e1 and e2 as columns."""
        return np.column_stack((self.e1, self.e2))

    @property
    def cos_alpha(self) -> float:
        # Taken straight from the dot product so orthogonal curbs give an
        # exact zero (arccos/cos round-tripping would not).
        return float(self.e1 @ self.e2)

    @property
    def sin_alpha(self) -> float:
        return float(np.sqrt(max(0.0, 1.0 - self.cos_alpha**2)))

    @property
    def perp(self) -> np.ndarray:
        """Unit vector orthogonal to e1, on the e2 side."""
        p = self.e2 - (self.e1 @ self.e2) * self.e1
        return p / np.linalg.norm(p)


@dataclass(frozen=True, eq=False)
class AffineMap2D:
    """An invertible affine map ``p -> linear @ p + translation``."""

    linear: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float)
        tr = np.asarray(self.translation, dtype=float)
        if lin.shape != (2, 2) or tr.shape != (2,):
            raise ValueError("linear must be 2x2 and translation length 2")
        if abs(np.linalg.det(lin)) <= 1e-12:
            raise ValueError("affine map is not invertible")
        lin = lin.copy()
        tr = tr.copy()
        lin.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", tr)

    def apply(self, points) -> np.ndarray:
        """Apply to one point (2,) or a batch (n, 2)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.translation

    def inverse(self) -> "AffineMap2D":
        inv = np.linalg.inv(self.linear)
        return AffineMap2D(inv, -inv @ self.translation)


def frame_from_curbs(origin, dir1, dir2) -> CurbsideFrame:
    """Build a curbside frame from the corner point and two curb directions.

    Directions need not be normalized. Raises :class:`DegenerateFrameError`
    if either direction is near zero or the curbs are (anti)parallel.
    """
    origin = _as_point(origin)
    d1 = _as_point(dir1)
    d2 = _as_point(dir2)
    n1 = np.linalg.norm(d1)
    n2 = np.linalg.norm(d2)
    if n1 < _MIN_DIR_NORM or n2 < _MIN_DIR_NORM:
        raise DegenerateFrameError("curb direction has near-zero length")
    e1 = d1 / n1
    e2 = d2 / n2
    cos_a = float(np.clip(e1 @ e2, -1.0, 1.0))
    alpha = float(np.arccos(cos_a))
    if np.sqrt(max(0.0, 1.0 - cos_a**2)) < _MIN_SIN_ALPHA:
        raise DegenerateFrameError("curbs are parallel or antiparallel")
    return CurbsideFrame(origin=origin, e1=e1, e2=e2, alpha=alpha)


def identity_frame() -> CurbsideFrame:
    """Orthogonal frame at the origin with axes along +x and +y."""
    return frame_from_curbs((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def _skew_matrix(frame: CurbsideFrame) -> np.ndarray:
    # Helper-frame coordinates to contravariant components. Exactly the
    # identity when the curbs are orthogonal.
    sin_a = frame.sin_alpha
    return np.array([[1.0, -frame.cos_alpha / sin_a], [0.0, 1.0 / sin_a]])


def curbside_transform(frame: CurbsideFrame, local_origin=(0.0, 0.0), local_rotation: float = 0.0) -> AffineMap2D:
    """The full affine map from local coordinates to contravariant components.

    The map is the composition of two stages applied in order:

    1. a rigid motion taking the curb corner to the origin and ``e1`` onto
       the +x axis (an intermediate orthogonal "helper" frame), then
    2. the constant skew matrix that converts helper coordinates to
       contravariant components along ``(e1, e2)``.

    ``local_origin`` and ``local_rotation`` give the pose of the frame the
    input points live in, relative to the coordinates ``frame`` itself is
    expressed in; the default is the identity pose (points already share
    the frame's coordinates).
    """
    c, s = np.cos(local_rotation), np.sin(local_rotation)
    pose_rot = np.array([[c, -s], [s, c]])
    pose_origin = _as_point(local_origin)

    # Helper frame: rows are e1 and its perpendicular on the e2 side.
    rigid = np.vstack((frame.e1, frame.perp))
    skew = _skew_matrix(frame)

    linear = skew @ rigid @ pose_rot
    translation = skew @ rigid @ (pose_origin - frame.origin)
    return AffineMap2D(linear, translation)


def to_curbside(frame: CurbsideFrame, p) -> np.ndarray:
    """Contravariant components of point(s) ``p`` in the curbside frame.

    Returns ``(x', y')`` with ``x'*e1 + y'*e2 = p - origin``. Accepts a
    single point (2,) or a batch (n, 2). Computed by solving the 2x2
    linear system in the curb basis, which is valid for every quadrant.
    """
    pts = np.asarray(p, dtype=float)
    disp = pts - frame.origin
    return np.linalg.solve(frame.basis, disp.T).T


def from_curbside(frame: CurbsideFrame, p) -> np.ndarray:
    """Inverse of :func:`to_curbside`: contravariant components to local point(s)."""
    comps = np.asarray(p, dtype=float)
    return comps @ frame.basis.T + frame.origin


def transform_trajectory(frame: CurbsideFrame, traj):
    """Map every position of ``traj`` into the curbside frame; timestamps kept."""
    from .trajectory import Trajectory

    return Trajectory(
        id=traj.id,
        dt=traj.dt,
        times=traj.times,
        xy=to_curbside(frame, traj.xy) if len(traj) else traj.xy,
        intent=traj.intent,
    )


def load_frame(path) -> CurbsideFrame:
    """Read a frame config file: ``{"origin": [x, y], "curb1": [dx, dy], "curb2": [dx, dy]}``."""
    with open(path) as fh:
        cfg = json.load(fh)
    try:
        return frame_from_curbs(cfg["origin"], cfg["curb1"], cfg["curb2"])
    except KeyError as exc:
        raise ValueError(f"frame config {path} is missing key {exc}") from exc


def frame_to_config(frame: CurbsideFrame) -> dict:
    """Frame as a JSON-ready dict. The angle is derived on load, never stored."""
    return {
        "origin": frame.origin.tolist(),
        "curb1": frame.e1.tolist(),
        "curb2": frame.e2.tolist(),
    }
