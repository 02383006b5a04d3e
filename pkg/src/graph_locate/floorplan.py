"""Floorplan specification and construction of the plan graph.

A floorplan is a set of axis-aligned rectangular room interiors plus wall
thickness and doorways. Each room contributes four inward-facing wall
surfaces; opposed faces of adjacent rooms (one wall thickness apart) become
shared walls, and boundary faces are paired with a synthetic exterior twin
so the walls layer stays total.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entities import Doorway, Floor, Room, RoomKind, WallSurface
from .entities import Wall as WallEntity
from .errors import InvalidDoorway, InvalidFloorplan, ParseError
from .factors import room_center, wall_center
from .frames import FrameId
from .graph import LayeredGraph
from .graph_io import _array, _number, _require, _string, _vector
from .planes import plane_cp

_GAP_TOL = 1e-6


@dataclass(frozen=True)
class RoomSpec:
    id: str
    x: tuple[float, float]
    y: tuple[float, float]

    @property
    def width(self) -> float:
        return self.x[1] - self.x[0]

    @property
    def height(self) -> float:
        return self.y[1] - self.y[0]


@dataclass(frozen=True)
class DoorwaySpec:
    id: str
    position: np.ndarray
    rooms: tuple[str, str]


@dataclass(frozen=True)
class FloorplanSpec:
    rooms: tuple[RoomSpec, ...]
    wall_thickness: float
    doorways: tuple[DoorwaySpec, ...] = ()

    def validate(self) -> "FloorplanSpec":
        if not self.rooms:
            raise InvalidFloorplan("floorplan has no rooms")
        if self.wall_thickness <= 0:
            raise InvalidFloorplan("wall_thickness must be positive")
        ids = [r.id for r in self.rooms]
        if len(set(ids)) != len(ids):
            raise InvalidFloorplan("duplicate room ids")
        for r in self.rooms:
            for lo, hi in (r.x, r.y):
                if not hi > lo:
                    raise InvalidFloorplan(f"room {r.id}: degenerate extent [{lo}, {hi}]")
                if hi - lo <= 2 * self.wall_thickness:
                    raise InvalidFloorplan(
                        f"room {r.id}: span {hi - lo:.3g} not larger than twice the wall thickness"
                    )
        for i, a in enumerate(self.rooms):
            for b in self.rooms[i + 1:]:
                if _overlap(a.x, b.x) > _GAP_TOL and _overlap(a.y, b.y) > _GAP_TOL:
                    raise InvalidFloorplan(f"rooms {a.id} and {b.id} overlap")
        by_id = {r.id: r for r in self.rooms}
        for d in self.doorways:
            for rid in d.rooms:
                if rid not in by_id:
                    raise InvalidDoorway(f"doorway {d.id} references unknown room {rid}")
            if d.rooms[0] == d.rooms[1]:
                raise InvalidDoorway(f"doorway {d.id} must connect two distinct rooms")
            if _shared_boundary(by_id[d.rooms[0]], by_id[d.rooms[1]], self.wall_thickness) is None:
                raise InvalidDoorway(
                    f"doorway {d.id}: rooms {d.rooms[0]} and {d.rooms[1]} are not adjacent"
                )
        return self


def _overlap(a: tuple[float, float], b: tuple[float, float]) -> float:
    return min(a[1], b[1]) - max(a[0], b[0])


def _shared_boundary(a: RoomSpec, b: RoomSpec, thickness: float):
    """(axis, position pair, shared span) of the wall between two adjacent rooms."""
    for lo_room, hi_room, flipped in ((a, b, False), (b, a, True)):
        if abs(hi_room.x[0] - lo_room.x[1] - thickness) <= _GAP_TOL:
            span = (max(a.y[0], b.y[0]), min(a.y[1], b.y[1]))
            if span[1] - span[0] > _GAP_TOL:
                return ("x", (lo_room.x[1], hi_room.x[0]), span, flipped)
        if abs(hi_room.y[0] - lo_room.y[1] - thickness) <= _GAP_TOL:
            span = (max(a.x[0], b.x[0]), min(a.x[1], b.x[1]))
            if span[1] - span[0] > _GAP_TOL:
                return ("y", (lo_room.y[1], hi_room.y[0]), span, flipped)
    return None


def floorplan_from_dict(data, path: str = "$") -> FloorplanSpec:
    thickness = _number(_require(data, "wall_thickness", path), f"{path}.wall_thickness")
    rooms = []
    for i, raw in enumerate(_array(_require(data, "rooms", path), f"{path}.rooms")):
        p = f"{path}.rooms[{i}]"
        x = _vector(_require(raw, "x", p), 2, f"{p}.x")
        y = _vector(_require(raw, "y", p), 2, f"{p}.y")
        rooms.append(RoomSpec(_string(_require(raw, "id", p), f"{p}.id"),
                              (float(x[0]), float(x[1])), (float(y[0]), float(y[1]))))
    doorways = []
    for i, raw in enumerate(_array(data.get("doorways", []), f"{path}.doorways")):
        p = f"{path}.doorways[{i}]"
        pair = _array(_require(raw, "rooms", p), f"{p}.rooms")
        if len(pair) != 2:
            raise ParseError("doorway needs exactly two rooms", f"{p}.rooms")
        doorways.append(DoorwaySpec(
            _string(_require(raw, "id", p), f"{p}.id"),
            _vector(_require(raw, "position", p), 3, f"{p}.position"),
            (_string(pair[0], f"{p}.rooms[0]"), _string(pair[1], f"{p}.rooms[1]")),
        ))
    return FloorplanSpec(tuple(rooms), thickness, tuple(doorways))


def floorplan_to_dict(spec: FloorplanSpec) -> dict:
    return {
        "wall_thickness": spec.wall_thickness,
        "rooms": [{"id": r.id, "x": list(r.x), "y": list(r.y)} for r in spec.rooms],
        "doorways": [
            {"id": d.id, "position": list(d.position), "rooms": list(d.rooms)}
            for d in spec.doorways
        ],
    }


# -- construction ---------------------------------------------------------------

# face keys in room-surface order: low-x, high-x, low-y, high-y
_FACES = ("xlo", "xhi", "ylo", "yhi")


def _face_plane(room: RoomSpec, face: str):
    """Inward-facing plane of one room face, before the global sign convention."""
    if face == "xlo":
        return (1.0, 0.0), room.x[0]
    if face == "xhi":
        return (-1.0, 0.0), -room.x[1]
    if face == "ylo":
        return (0.0, 1.0), room.y[0]
    return (0.0, -1.0), -room.y[1]


def build_agraph(spec: FloorplanSpec) -> LayeredGraph:
    """Construct the two-layer plan graph (walls + rooms) in frame B."""
    spec.validate()
    surfaces: dict[str, WallSurface] = {}
    rooms: dict[str, Room] = {}
    walls: dict[str, WallEntity] = {}
    owner_wall: dict[str, str] = {}

    def add_surface(sid, normal, offset, owner_room):
        plane = plane_cp(np.array([normal[0], normal[1], 0.0]), offset, FrameId.B)
        surfaces[sid] = WallSurface.from_plane(sid, plane, owner_room)

    for room in spec.rooms:
        for face in _FACES:
            normal, offset = _face_plane(room, face)
            add_surface(f"ws_{room.id}_{face}", normal, offset, room.id)
        sids = tuple(f"ws_{room.id}_{face}" for face in _FACES)
        center = room_center(*(surfaces[s].plane for s in sids))
        rooms[room.id] = Room(room.id, center, RoomKind.FOUR_WALL, sids, FrameId.B)

    def add_wall(sid_a, sid_b, axis, mid, span):
        wid = f"wall_{len(walls)}"
        if axis == "x":
            start = np.array([mid, span[0], 0.0])
        else:
            start = np.array([span[0], mid, 0.0])
        center = wall_center(surfaces[sid_a].plane, surfaces[sid_b].plane, start)
        walls[wid] = WallEntity(wid, center, (sid_a, sid_b), start, FrameId.B)
        for sid in (sid_a, sid_b):
            owner_wall.setdefault(sid, wid)

    # interior walls between adjacent rooms
    paired: set[str] = set()
    for i, a in enumerate(spec.rooms):
        for b in spec.rooms[i + 1:]:
            shared = _shared_boundary(a, b, spec.wall_thickness)
            if shared is None:
                continue
            axis, positions, span, flipped = shared
            lo_room, hi_room = (b, a) if flipped else (a, b)
            face = "xhi" if axis == "x" else "yhi"
            other = "xlo" if axis == "x" else "ylo"
            sid_a, sid_b = f"ws_{lo_room.id}_{face}", f"ws_{hi_room.id}_{other}"
            add_wall(sid_a, sid_b, axis, 0.5 * (positions[0] + positions[1]), span)
            paired.update((sid_a, sid_b))

    # boundary walls: pair the leftover faces with synthetic exterior twins
    for room in spec.rooms:
        for face in _FACES:
            sid = f"ws_{room.id}_{face}"
            if sid in paired:
                continue
            normal, offset = _face_plane(room, face)
            # exterior face: one thickness outward, normal reversed
            ext_offset = -(offset - spec.wall_thickness)
            ext_sid = f"{sid}_ext"
            add_surface(ext_sid, (-normal[0], -normal[1]), ext_offset, None)
            axis = "x" if face.startswith("x") else "y"
            interior = room.x[0] if face == "xlo" else room.x[1] if face == "xhi" \
                else room.y[0] if face == "ylo" else room.y[1]
            sign = -1.0 if face.endswith("lo") else 1.0
            mid = interior + sign * spec.wall_thickness / 2.0
            span = room.y if axis == "x" else room.x
            add_wall(sid, ext_sid, axis, mid, span)

    surfaces = {
        sid: WallSurface(s.id, s.plane, s.axis, s.owner_room, owner_wall.get(sid))
        for sid, s in surfaces.items()
    }

    doorways = {}
    for d in spec.doorways:
        doorways[d.id] = Doorway(d.id, d.position, d.rooms)

    centers = np.array([rooms[r.id].center for r in spec.rooms])
    floor = Floor("floor_0", centers.mean(axis=0), tuple(r.id for r in spec.rooms))

    graph = LayeredGraph(FrameId.B, surfaces, walls, rooms, doorways, {},
                         {"floor_0": floor})
    return graph.validate_profile("agraph")
