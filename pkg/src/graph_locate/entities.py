"""Node types for the layered graphs: surfaces, walls, rooms, doorways, keyframes, floors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .frames import FrameId, readonly_array, wrap_angle
from .planes import PlaneCP


class Axis(Enum):
    X = "X"
    Y = "Y"


class RoomKind(Enum):
    FOUR_WALL = "four_wall"
    TWO_WALL = "two_wall"


def classify_axis(normal: np.ndarray) -> Axis:
    """X when |nx| >= |ny|, else Y (ties go to X; Manhattan inputs never tie)."""
    return Axis.X if abs(normal[0]) >= abs(normal[1]) else Axis.Y


@dataclass(frozen=True)
class WallSurface:
    """One planar face of a wall, the atomic landmark of both graphs."""

    id: str
    plane: PlaneCP
    axis: Axis
    owner_room: str | None = None
    owner_wall: str | None = None

    def __post_init__(self):
        if self.axis is not classify_axis(self.plane.normal):
            raise ValueError(f"surface {self.id}: axis tag disagrees with its normal")

    @classmethod
    def from_plane(cls, id: str, plane: PlaneCP, owner_room: str | None = None,
                   owner_wall: str | None = None) -> "WallSurface":
        return cls(id, plane, classify_axis(plane.normal), owner_room, owner_wall)

    @property
    def frame(self) -> FrameId:
        return self.plane.frame


@dataclass(frozen=True)
class Wall:
    """A physical wall: two opposed surfaces, a center point, and the segment start."""

    id: str
    center: np.ndarray
    surfaces: tuple[str, str]
    start_point: np.ndarray
    frame: FrameId

    def __post_init__(self):
        object.__setattr__(self, "center", readonly_array(self.center))
        object.__setattr__(self, "start_point", readonly_array(self.start_point))
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        if len(self.surfaces) != 2:
            raise ValueError(f"wall {self.id}: exactly two surfaces required")


@dataclass(frozen=True)
class Room:
    """A room summarizing its bounding wall surfaces.

    Two-wall rooms exist as data only; the matcher never pairs them.
    """

    id: str
    center: np.ndarray
    kind: RoomKind
    surfaces: tuple[str, ...]
    frame: FrameId

    def __post_init__(self):
        object.__setattr__(self, "center", readonly_array(self.center))
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        expected = 4 if self.kind is RoomKind.FOUR_WALL else 2
        if len(self.surfaces) != expected:
            raise ValueError(
                f"room {self.id}: {self.kind.value} rooms need {expected} surfaces, "
                f"got {len(self.surfaces)}"
            )


@dataclass(frozen=True)
class Doorway:
    """A point entity connecting two rooms; only ever present in the plan graph."""

    id: str
    position: np.ndarray
    rooms: tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "position", readonly_array(self.position))
        object.__setattr__(self, "rooms", tuple(self.rooms))
        if len(self.rooms) != 2 or self.rooms[0] == self.rooms[1]:
            raise ValueError(f"doorway {self.id}: needs two distinct rooms")


@dataclass(frozen=True)
class Keyframe:
    """A robot pose sample: planar pose lifted to 3D with zero roll/pitch/z."""

    id: str
    pose: np.ndarray  # (x, y, yaw)
    frame: FrameId
    timestamp: int

    def __post_init__(self):
        p = np.asarray(self.pose, dtype=float).copy()
        if p.shape != (3,):
            raise ValueError(f"keyframe {self.id}: pose must be (x, y, yaw)")
        p[2] = wrap_angle(p[2])
        p.setflags(write=False)
        object.__setattr__(self, "pose", p)
        object.__setattr__(self, "timestamp", int(self.timestamp))

    @property
    def xy(self) -> np.ndarray:
        return self.pose[:2]


@dataclass(frozen=True)
class Floor:
    """Floor node positioned at the center of its rooms."""

    id: str
    center: np.ndarray
    rooms: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "center", readonly_array(self.center))
        object.__setattr__(self, "rooms", tuple(self.rooms))
