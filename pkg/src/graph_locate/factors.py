"""Factor residuals over graph entities: wall, room and doorway constraints.

The wall-center map intentionally uses the symmetric midpoint of the two
closest points, w = (|d1| n1 + |d2| n2) / 2, which reproduces the geometric
wall center for every normal configuration (opposed normals of equal
distance included).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .entities import Axis, Room, Wall, classify_axis
from .errors import AxisMismatch, InvalidDoorway
from .planes import PlaneCP, require_same_frame


class FactorKind(Enum):
    WALL = "wall"
    DOORWAY = "doorway"
    ROOM_TO_SURFACES = "room_to_surfaces"
    ROOM_MERGE = "room_merge"
    SURFACE_MERGE = "surface_merge"
    ODOMETRY = "odometry"


@dataclass(frozen=True)
class FactorResidual:
    """A residual vector with its information matrix (inverse covariance)."""

    value: np.ndarray
    information: np.ndarray
    kind: FactorKind

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float).copy()
        info = np.asarray(self.information, dtype=float).copy()
        n = value.shape[0]
        if info.shape != (n, n):
            raise ValueError(f"information must be {n}x{n}, got {info.shape}")
        if np.max(np.abs(info - info.T)) > 1e-9:
            raise ValueError("information matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(info)) < -1e-9:
            raise ValueError("information matrix must be positive semidefinite")
        value.setflags(write=False)
        info.setflags(write=False)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "information", info)

    def weighted_squared_norm(self) -> float:
        return float(self.value @ self.information @ self.value)


#: Per-kind information matrices; identity unless overridden.
InformationConfig = dict[FactorKind, np.ndarray]


def information_for(kind: FactorKind, dim: int,
                    config: InformationConfig | None = None) -> np.ndarray:
    if config and kind in config:
        info = np.asarray(config[kind], dtype=float)
        if info.ndim == 0:
            return float(info) * np.eye(dim)
        return info
    return np.eye(dim)


# -- wall layer ----------------------------------------------------------------


def wall_center(p1: PlaneCP, p2: PlaneCP, s: np.ndarray) -> np.ndarray:
    """Center of the wall bounded by two opposed same-axis surfaces.

    Returns w + (s - (s . w_hat) w_hat): the midpoint of the two closest
    points plus the tangential part of the wall's start point. When the
    midpoint sits at the origin, w_hat degenerates and p1's normal is used
    as the projection direction instead.
    """
    require_same_frame(p1, p2)
    if classify_axis(p1.normal) is not classify_axis(p2.normal):
        raise AxisMismatch("wall surfaces must share an axis")
    s = np.asarray(s, dtype=float)
    w = 0.5 * (abs(p1.dist) * p1.normal + abs(p2.dist) * p2.normal)
    norm = float(np.linalg.norm(w))
    w_hat = p1.normal if norm < 1e-9 else w / norm
    return w + (s - float(s @ w_hat) * w_hat)


def wall_factor(wall: Wall, p1: PlaneCP, p2: PlaneCP,
                config: InformationConfig | None = None) -> FactorResidual:
    """Residual between a wall's stored center and the one its surfaces imply."""
    value = wall.center - wall_center(p1, p2, wall.start_point)
    return FactorResidual(value, information_for(FactorKind.WALL, 3, config), FactorKind.WALL)


# -- room layer ------------------------------------------------------------------


def room_center(px1: PlaneCP, px2: PlaneCP, py1: PlaneCP, py2: PlaneCP) -> np.ndarray:
    """Room center from two X-axis and two Y-axis surfaces (axis-aligned geometry).

    cx is the x component of the X-pair closest-point midpoint, cy the y
    component of the Y-pair one.
    """
    require_same_frame(px1, px2, py1, py2)
    for p, axis in ((px1, Axis.X), (px2, Axis.X), (py1, Axis.Y), (py2, Axis.Y)):
        if classify_axis(p.normal) is not axis:
            raise AxisMismatch(f"expected an {axis.value}-axis surface")
    cx = 0.5 * (px1.closest_point[0] + px2.closest_point[0])
    cy = 0.5 * (py1.closest_point[1] + py2.closest_point[1])
    return np.array([cx, cy])


def _opposed_pairs(planes: list[PlaneCP]) -> list[tuple[PlaneCP, PlaneCP]]:
    """Group four surfaces into two pairs sharing a line direction."""
    if len(planes) != 4:
        raise AxisMismatch(f"expected four surfaces, got {len(planes)}")
    first = planes[0]
    mates = []
    for other in planes[1:]:
        cross = first.normal[0] * other.normal[1] - first.normal[1] * other.normal[0]
        mates.append((abs(cross), other))
    mates.sort(key=lambda m: m[0])
    partner = mates[0][1]
    rest = [m[1] for m in mates[1:]]
    return [(first, partner), (rest[0], rest[1])]


def room_center_from_surfaces(planes: list[PlaneCP]) -> np.ndarray:
    """Room center as the intersection of the two opposed-pair midlines.

    Unlike :func:`room_center` this stays exact for rooms expressed in a
    rotated frame, where axis labels no longer align with the walls.
    """
    require_same_frame(*planes)
    rows, rhs = [], []
    for a, b in _opposed_pairs(planes):
        na, da = a.normal[:2], a.dist
        nb, db = b.normal[:2], b.dist
        if float(na @ nb) < 0.0:
            nb, db = -nb, -db
        u = na + nb
        u = u / np.linalg.norm(u)
        rows.append(u)
        rhs.append(0.5 * (da / float(na @ u) + db / float(nb @ u)))
    matrix = np.array(rows)
    if abs(np.linalg.det(matrix)) < 1e-6:
        raise AxisMismatch("room surfaces do not span two directions")
    return np.linalg.solve(matrix, np.array(rhs))


def doorway_offsets(position: np.ndarray, r1: Room, r2: Room) -> tuple[np.ndarray, np.ndarray]:
    """Doorway position relative to each room center, measured at construction."""
    lift1 = np.array([r1.center[0], r1.center[1], 0.0])
    lift2 = np.array([r2.center[0], r2.center[1], 0.0])
    position = np.asarray(position, dtype=float)
    return position - lift1, position - lift2


def doorway_factor(doorway, r1: Room, r2: Room,
                   offsets: tuple[np.ndarray, np.ndarray] | None = None,
                   config: InformationConfig | None = None) -> FactorResidual:
    """Doorway-to-rooms residual: the two room-relative doorway predictions must agree.

    ``offsets`` are the construction-time room-relative doorway positions;
    when omitted they are measured from the rooms passed in, making the
    residual zero by definition. The factor becomes informative once room
    centers move away from the reference construction.
    """
    if set(doorway.rooms) != {r1.id, r2.id}:
        raise InvalidDoorway(
            f"doorway {doorway.id} connects {doorway.rooms}, got rooms ({r1.id}, {r2.id})"
        )
    if offsets is None:
        offsets = doorway_offsets(doorway.position, r1, r2)
    delta1, delta2 = offsets
    lift1 = np.array([r1.center[0], r1.center[1], 0.0])
    lift2 = np.array([r2.center[0], r2.center[1], 0.0])
    value = (lift1 + delta1) - (lift2 + delta2)
    return FactorResidual(value, information_for(FactorKind.DOORWAY, 3, config),
                          FactorKind.DOORWAY)
