"""JSON serialization for layered graphs and transforms.

All lengths are meters and all angles radians. Serialization is value-stable:
identical graphs produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from .entities import Doorway, Floor, Keyframe, Room, RoomKind, WallSurface, Wall
from .errors import ParseError
from .frames import FrameId, FrameTransform
from .graph import LayeredGraph, OdometryEdge
from .planes import plane_cp

logger = logging.getLogger(__name__)


# -- generic parse helpers ---------------------------------------------------

def _require(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path)
    if key not in obj:
        raise ParseError(f"missing key {key!r}", path)
    return obj[key]

def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError("expected a string", path)
    return value

def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("expected a number", path)
    return float(value)

def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("expected an integer", path)
    return value

def _vector(value: Any, n: int, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"expected a {n}-element array", path)
    return np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])

def _array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError("expected an array", path)
    return value


# -- graph <-> dict ----------------------------------------------------------

def graph_to_dict(graph: LayeredGraph) -> dict:
    return {
        "frame": graph.frame.value,
        "wall_surfaces": [
            {
                "id": s.id,
                "normal": list(s.plane.normal),
                "dist": s.plane.dist,
                "axis": s.axis.value,
                "owner_room": s.owner_room,
                "owner_wall": s.owner_wall,
            }
            for s in graph.wall_surfaces.values()
        ],
        "walls": [
            {
                "id": w.id,
                "center": list(w.center),
                "surfaces": list(w.surfaces),
                "start_point": list(w.start_point),
            }
            for w in graph.walls.values()
        ],
        "rooms": [
            {
                "id": r.id,
                "center": list(r.center),
                "kind": r.kind.value,
                "surfaces": list(r.surfaces),
            }
            for r in graph.rooms.values()
        ],
        "doorways": [
            {"id": d.id, "position": list(d.position), "rooms": list(d.rooms)}
            for d in graph.doorways.values()
        ],
        "keyframes": [
            {"id": k.id, "pose": list(k.pose), "timestamp": k.timestamp}
            for k in graph.keyframes.values()
        ],
        "floors": [
            {"id": f.id, "center": list(f.center), "rooms": list(f.rooms)}
            for f in graph.floors.values()
        ],
        "odometry": [
            {"from": e.frm, "to": e.to, "delta": list(e.delta)} for e in graph.odometry
        ],
    }


def graph_from_dict(data: Any, path: str = "$") -> LayeredGraph:
    frame_label = _string(_require(data, "frame", path), f"{path}.frame")
    try:
        frame = FrameId(frame_label)
    except ValueError:
        raise ParseError(f"frame must be 'B' or 'M', got {frame_label!r}", f"{path}.frame")

    surfaces: dict[str, WallSurface] = {}
    for i, raw in enumerate(_array(data.get("wall_surfaces", []), f"{path}.wall_surfaces")):
        p = f"{path}.wall_surfaces[{i}]"
        sid = _string(_require(raw, "id", p), f"{p}.id")
        normal = _vector(_require(raw, "normal", p), 3, f"{p}.normal")
        dist = _number(_require(raw, "dist", p), f"{p}.dist")
        norm = float(np.linalg.norm(normal))
        if abs(norm - 1.0) > 1e-9 and norm > 1e-9:
            logger.warning("surface %s: normal has length %.6g, normalizing", sid, norm)
        plane = plane_cp(normal, dist, frame)
        surfaces[sid] = WallSurface.from_plane(
            sid, plane, raw.get("owner_room"), raw.get("owner_wall")
        )

    walls: dict[str, Wall] = {}
    for i, raw in enumerate(_array(data.get("walls", []), f"{path}.walls")):
        p = f"{path}.walls[{i}]"
        wid = _string(_require(raw, "id", p), f"{p}.id")
        pair = _array(_require(raw, "surfaces", p), f"{p}.surfaces")
        if len(pair) != 2:
            raise ParseError("wall needs exactly two surfaces", f"{p}.surfaces")
        walls[wid] = Wall(
            wid,
            _vector(_require(raw, "center", p), 3, f"{p}.center"),
            (_string(pair[0], f"{p}.surfaces[0]"), _string(pair[1], f"{p}.surfaces[1]")),
            _vector(_require(raw, "start_point", p), 3, f"{p}.start_point"),
            frame,
        )

    rooms: dict[str, Room] = {}
    for i, raw in enumerate(_array(data.get("rooms", []), f"{path}.rooms")):
        p = f"{path}.rooms[{i}]"
        rid = _string(_require(raw, "id", p), f"{p}.id")
        kind_label = _string(_require(raw, "kind", p), f"{p}.kind")
        try:
            kind = RoomKind(kind_label)
        except ValueError:
            raise ParseError(f"unknown room kind {kind_label!r}", f"{p}.kind")
        sids = tuple(
            _string(s, f"{p}.surfaces[{j}]")
            for j, s in enumerate(_array(_require(raw, "surfaces", p), f"{p}.surfaces"))
        )
        try:
            rooms[rid] = Room(rid, _vector(_require(raw, "center", p), 2, f"{p}.center"),
                              kind, sids, frame)
        except ValueError as e:
            raise ParseError(str(e), p)

    doorways: dict[str, Doorway] = {}
    for i, raw in enumerate(_array(data.get("doorways", []), f"{path}.doorways")):
        p = f"{path}.doorways[{i}]"
        did = _string(_require(raw, "id", p), f"{p}.id")
        pair = _array(_require(raw, "rooms", p), f"{p}.rooms")
        if len(pair) != 2:
            raise ParseError("doorway needs exactly two rooms", f"{p}.rooms")
        try:
            doorways[did] = Doorway(
                did,
                _vector(_require(raw, "position", p), 3, f"{p}.position"),
                (_string(pair[0], f"{p}.rooms[0]"), _string(pair[1], f"{p}.rooms[1]")),
            )
        except ValueError as e:
            raise ParseError(str(e), p)

    keyframes: dict[str, Keyframe] = {}
    for i, raw in enumerate(_array(data.get("keyframes", []), f"{path}.keyframes")):
        p = f"{path}.keyframes[{i}]"
        kid = _string(_require(raw, "id", p), f"{p}.id")
        keyframes[kid] = Keyframe(
            kid,
            _vector(_require(raw, "pose", p), 3, f"{p}.pose"),
            frame,
            _integer(_require(raw, "timestamp", p), f"{p}.timestamp"),
        )

    floors: dict[str, Floor] = {}
    for i, raw in enumerate(_array(data.get("floors", []), f"{path}.floors")):
        p = f"{path}.floors[{i}]"
        fid = _string(_require(raw, "id", p), f"{p}.id")
        floors[fid] = Floor(
            fid,
            _vector(_require(raw, "center", p), 2, f"{p}.center"),
            tuple(_string(r, f"{p}.rooms[{j}]")
                  for j, r in enumerate(_array(_require(raw, "rooms", p), f"{p}.rooms"))),
        )

    odometry = []
    for i, raw in enumerate(_array(data.get("odometry", []), f"{path}.odometry")):
        p = f"{path}.odometry[{i}]"
        odometry.append(OdometryEdge(
            _string(_require(raw, "from", p), f"{p}.from"),
            _string(_require(raw, "to", p), f"{p}.to"),
            _vector(_require(raw, "delta", p), 3, f"{p}.delta"),
        ))

    try:
        return LayeredGraph(frame, surfaces, walls, rooms, doorways, keyframes,
                            floors, tuple(odometry))
    except Exception as e:
        raise ParseError(str(e), path)


# -- transforms --------------------------------------------------------------

def transform_to_dict(t: FrameTransform) -> dict:
    return {"translation": list(t.translation), "yaw": t.yaw}


def transform_from_dict(data: Any, path: str = "$") -> FrameTransform:
    return FrameTransform(
        _vector(_require(data, "translation", path), 2, f"{path}.translation"),
        _number(_require(data, "yaw", path), f"{path}.yaw"),
    )


# -- files -------------------------------------------------------------------

def dump_json(data: dict, path: str | Path):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}", "$")
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "$")


def save_graph(graph: LayeredGraph, path: str | Path):
    dump_json(graph_to_dict(graph), path)


def load_graph(path: str | Path) -> LayeredGraph:
    return graph_from_dict(load_json(path))
