"""Reference frames and the planar rigid transform linking them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class FrameId(Enum):
    """The two frames of the system: plan frame B and robot map frame M."""

    B = "B"
    M = "M"


def other_frame(frame: FrameId) -> FrameId:
    return FrameId.M if frame is FrameId.B else FrameId.B


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.fmod(angle + math.pi, math.tau)
    if r <= 0.0:
        r += math.tau
    return r - math.pi


def readonly_array(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrameTransform:
    """Planar rigid transform (x, y, yaw) taking map-frame coordinates to plan-frame ones.

    ``yaw`` is normalized to (-pi, pi] at construction. The transform acts as
    ``q -> R(yaw) q + translation`` on planar points.
    """

    translation: np.ndarray
    yaw: float

    def __post_init__(self):
        t = readonly_array(self.translation)
        if t.shape != (2,):
            raise ValueError(f"translation must be a 2-vector, got shape {t.shape}")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))

    @classmethod
    def identity(cls) -> "FrameTransform":
        return cls(np.zeros(2), 0.0)

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return np.array([[c, -s], [s, c]])

    def compose(self, other: "FrameTransform") -> "FrameTransform":
        """Return the transform applying ``other`` first, then ``self``."""
        return FrameTransform(
            self.rotation() @ other.translation + self.translation,
            self.yaw + other.yaw,
        )

    def inverse(self) -> "FrameTransform":
        rt = self.rotation().T
        return FrameTransform(-(rt @ self.translation), -self.yaw)

    def apply_point(self, q: np.ndarray) -> np.ndarray:
        """Apply the planar rigid action to a 2- or 3-vector (z untouched)."""
        q = np.asarray(q, dtype=float)
        if q.shape == (2,):
            return self.rotation() @ q + self.translation
        if q.shape == (3,):
            xy = self.rotation() @ q[:2] + self.translation
            return np.array([xy[0], xy[1], q[2]])
        raise ValueError(f"expected a 2- or 3-vector, got shape {q.shape}")

    def apply_pose(self, pose: np.ndarray) -> np.ndarray:
        """Apply to a planar pose (x, y, yaw)."""
        pose = np.asarray(pose, dtype=float)
        xy = self.rotation() @ pose[:2] + self.translation
        return np.array([xy[0], xy[1], wrap_angle(pose[2] + self.yaw)])

    def approx_equal(self, other: "FrameTransform", tol: float = 1e-9) -> bool:
        return (
            float(np.max(np.abs(self.translation - other.translation))) <= tol
            and abs(wrap_angle(self.yaw - other.yaw)) <= tol
        )


def transform_point(transform: FrameTransform, q: np.ndarray) -> np.ndarray:
    """Planar rigid action on a point; see :meth:`FrameTransform.apply_point`."""
    return transform.apply_point(q)
