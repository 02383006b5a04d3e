"""Closest-point plane representation and its planar rigid action.

A plane is stored as a unit normal plus a non-negative perpendicular
distance; the closest point to the frame origin is ``dist * normal``.
Distances are kept non-negative by flipping the normal to point away from
the origin, so equal planes always compare equal regardless of how they
were produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FrameError, InvalidPlane
from .frames import FrameId, FrameTransform, other_frame, wrap_angle

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class PlaneCP:
    """A plane as (unit normal, non-negative distance) in a tagged frame."""

    normal: np.ndarray
    dist: float
    frame: FrameId

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).copy()
        if n.shape != (3,):
            raise InvalidPlane(f"normal must be a 3-vector, got shape {n.shape}")
        if abs(np.linalg.norm(n) - 1.0) > _UNIT_TOL:
            raise InvalidPlane("normal is not unit length; use plane_cp() to build planes")
        if self.dist < 0.0:
            raise InvalidPlane("dist must be non-negative; use plane_cp() to build planes")
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "dist", float(self.dist))

    @property
    def closest_point(self) -> np.ndarray:
        """The point on the plane closest to the frame origin."""
        return self.dist * self.normal

    @property
    def azimuth(self) -> float:
        return math.atan2(self.normal[1], self.normal[0])

    @property
    def elevation(self) -> float:
        return math.asin(float(np.clip(self.normal[2], -1.0, 1.0)))

    def azel_view(self) -> tuple[float, float, float]:
        """(azimuth, elevation, distance) view of the plane."""
        return (self.azimuth, self.elevation, self.dist)

    def signed_distance(self, q: np.ndarray) -> float:
        """Signed distance of point ``q`` from the plane (positive on the normal side)."""
        q = np.asarray(q, dtype=float)
        if q.shape == (2,):
            q = np.array([q[0], q[1], 0.0])
        return float(q @ self.normal - self.dist)

    def approx_equal(self, other: "PlaneCP", tol: float = 1e-9) -> bool:
        return (
            self.frame is other.frame
            and abs(self.dist - other.dist) <= tol
            and float(np.max(np.abs(self.normal - other.normal))) <= tol
        )


def plane_cp(normal: np.ndarray, dist: float, frame: FrameId) -> PlaneCP:
    """Build a plane from a (possibly unnormalized) normal and distance.

    The pair is treated as plane-equation coefficients ``q . normal = dist``,
    so both are rescaled by the normal's length. The sign convention is then
    enforced: dist >= 0 with the normal pointing away from the origin. A
    plane through the origin keeps the supplied normal direction.
    """
    n = np.asarray(normal, dtype=float)
    if n.shape == (2,):
        n = np.array([n[0], n[1], 0.0])
    if n.shape != (3,):
        raise InvalidPlane(f"normal must be a 3-vector, got shape {n.shape}")
    length = float(np.linalg.norm(n))
    if length <= 1e-9:
        raise InvalidPlane("zero-length normal")
    n = n / length
    d = float(dist) / length
    if d < 0.0:
        n, d = -n, -d
    return PlaneCP(n + 0.0, abs(d), frame)  # +0.0 clears negative zeros


def plane_from_azel(azimuth: float, elevation: float, dist: float, frame: FrameId) -> PlaneCP:
    """Inverse of :meth:`PlaneCP.azel_view`."""
    ce = math.cos(elevation)
    n = np.array([ce * math.cos(azimuth), ce * math.sin(azimuth), math.sin(elevation)])
    return plane_cp(n, dist, frame)


def rotate_normal_z(normal: np.ndarray, angle: float) -> np.ndarray:
    """Rotate a 3-vector about the z axis."""
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = normal
    return np.array([c * x - s * y, s * x + c * y, z])


def transform_plane(transform: FrameTransform, plane: PlaneCP) -> PlaneCP:
    """Re-express a plane in the other frame under the planar rigid transform.

    The normal rotates by yaw, the distance shifts by the translation's
    component along the rotated normal, and the sign convention is re-applied.
    """
    n = rotate_normal_z(plane.normal, transform.yaw)
    d = plane.dist + float(transform.translation @ n[:2])
    return plane_cp(n, d, other_frame(plane.frame))


def require_same_frame(*planes: PlaneCP) -> FrameId:
    frames = {p.frame for p in planes}
    if len(frames) != 1:
        raise FrameError(f"planes from mixed frames: {sorted(f.value for f in frames)}")
    return planes[0].frame


def signed_angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Signed angle about +z rotating planar direction ``a`` onto ``b``, in (-pi, pi]."""
    return wrap_angle(math.atan2(b[1], b[0]) - math.atan2(a[1], a[0]))
