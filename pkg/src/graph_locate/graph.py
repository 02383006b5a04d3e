"""Frame-tagged container holding every node layer plus typed adjacency."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entities import Doorway, Floor, Keyframe, Room, Wall, WallSurface
from .errors import LayerError
from .frames import FrameId, readonly_array


@dataclass(frozen=True)
class OdometryEdge:
    """Relative planar pose measurement between two consecutive keyframes."""

    frm: str
    to: str
    delta: np.ndarray  # (dx, dy, dyaw) in the frame of ``frm``

    def __post_init__(self):
        object.__setattr__(self, "delta", readonly_array(self.delta))


@dataclass(frozen=True)
class TypedEdges:
    """Adjacency lists derived from node references, grouped by relation."""

    room_surface: tuple[tuple[str, str], ...]
    wall_surface: tuple[tuple[str, str], ...]
    doorway_room: tuple[tuple[str, str], ...]
    floor_room: tuple[tuple[str, str], ...]
    odometry: tuple[OdometryEdge, ...]


@dataclass(frozen=True)
class LayeredGraph:
    """An A-Graph (frame B), S-Graph (frame M) or merged graph, by profile.

    Node collections are id-indexed dicts; treat them as read-only. Adjacency
    other than odometry is derived from node reference fields, keeping one
    source of truth.
    """

    frame: FrameId
    wall_surfaces: dict[str, WallSurface] = field(default_factory=dict)
    walls: dict[str, Wall] = field(default_factory=dict)
    rooms: dict[str, Room] = field(default_factory=dict)
    doorways: dict[str, Doorway] = field(default_factory=dict)
    keyframes: dict[str, Keyframe] = field(default_factory=dict)
    floors: dict[str, Floor] = field(default_factory=dict)
    odometry: tuple[OdometryEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "odometry", tuple(self.odometry))
        self._check_ids_unique()
        self._check_references()

    # -- validation ---------------------------------------------------------

    def _check_ids_unique(self):
        seen: set[str] = set()
        for collection in (self.wall_surfaces, self.walls, self.rooms,
                           self.doorways, self.keyframes, self.floors):
            for node_id, node in collection.items():
                if node_id != node.id:
                    raise LayerError(f"node stored under key {node_id!r} but has id {node.id!r}")
                if node_id in seen:
                    raise LayerError(f"duplicate node id {node_id!r}")
                seen.add(node_id)

    def _check_references(self):
        for wall in self.walls.values():
            for sid in wall.surfaces:
                if sid not in self.wall_surfaces:
                    raise LayerError(f"wall {wall.id} references missing surface {sid}")
        for room in self.rooms.values():
            for sid in room.surfaces:
                if sid not in self.wall_surfaces:
                    raise LayerError(f"room {room.id} references missing surface {sid}")
        for dw in self.doorways.values():
            for rid in dw.rooms:
                if rid not in self.rooms:
                    raise LayerError(f"doorway {dw.id} references missing room {rid}")
        for floor in self.floors.values():
            for rid in floor.rooms:
                if rid not in self.rooms:
                    raise LayerError(f"floor {floor.id} references missing room {rid}")
        for edge in self.odometry:
            for kid in (edge.frm, edge.to):
                if kid not in self.keyframes:
                    raise LayerError(f"odometry edge references missing keyframe {kid}")
        for surface in self.wall_surfaces.values():
            if surface.plane.frame is not self.frame:
                raise LayerError(f"surface {surface.id} tagged {surface.plane.frame.value}, "
                                 f"graph is {self.frame.value}")
            if surface.owner_room is not None and surface.owner_room not in self.rooms:
                raise LayerError(f"surface {surface.id} owned by missing room {surface.owner_room}")
            if surface.owner_wall is not None and surface.owner_wall not in self.walls:
                raise LayerError(f"surface {surface.id} owned by missing wall {surface.owner_wall}")
        timestamps = [kf.timestamp for kf in self.keyframes.values()]
        if timestamps != sorted(set(timestamps)):
            raise LayerError("keyframe timestamps must be strictly increasing")
        if len(self.floors) > 1:
            raise LayerError("single-floor graphs only")

    def validate_profile(self, profile: str):
        """Enforce layer restrictions: 'agraph' has no keyframes, 'sgraph' no walls/doorways."""
        if profile == "agraph":
            if self.frame is not FrameId.B:
                raise LayerError("an A-Graph must be in frame B")
            if self.keyframes:
                raise LayerError("an A-Graph carries no keyframes")
        elif profile == "sgraph":
            if self.frame is not FrameId.M:
                raise LayerError("an S-Graph must be in frame M")
            if self.doorways:
                raise LayerError("an S-Graph carries no doorways")
            if self.walls:
                raise LayerError("an S-Graph carries no walls")
        elif profile != "merged":
            raise ValueError(f"unknown profile {profile!r}")
        return self

    # -- convenience --------------------------------------------------------

    @property
    def edges(self) -> TypedEdges:
        room_surface = tuple((r.id, sid) for r in self.rooms.values() for sid in r.surfaces)
        wall_surface = tuple((w.id, sid) for w in self.walls.values() for sid in w.surfaces)
        doorway_room = tuple((d.id, rid) for d in self.doorways.values() for rid in d.rooms)
        floor_room = tuple((f.id, rid) for f in self.floors.values() for rid in f.rooms)
        return TypedEdges(room_surface, wall_surface, doorway_room, floor_room, self.odometry)

    def room_surfaces(self, room_id: str) -> list[WallSurface]:
        return [self.wall_surfaces[sid] for sid in self.rooms[room_id].surfaces]

    def keyframes_in_order(self) -> list[Keyframe]:
        return sorted(self.keyframes.values(), key=lambda kf: kf.timestamp)
