"""Static SVG rendering of graphs, trajectories and match links.

Output is deterministic: nodes are drawn in sorted id order and every
coordinate is formatted with fixed precision, so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .graph import LayeredGraph
from .matching.pairs import MatchLevel, MatchSet

_MARGIN = 1.5
_STYLE = (
    "polygon.room{fill:#e8eef7;stroke:#4a6fa5;stroke-width:0.05}"
    "line.surface{stroke:#1f3e5a;stroke-width:0.08}"
    "line.tick{stroke:#d08a1f;stroke-width:0.04}"
    "circle.doorway{fill:none;stroke:#7a4aa5;stroke-width:0.05}"
    "polyline.trajectory{fill:none;stroke:#2a8f4a;stroke-width:0.06}"
    "line.match{stroke:#c03a3a;stroke-width:0.04;stroke-dasharray:0.2,0.15}"
)


def _fmt(value: float) -> str:
    out = f"{value:.4f}"
    return "0.0000" if out == "-0.0000" else out


def _room_corners(graph: LayeredGraph, room_id: str) -> np.ndarray | None:
    """Corner points of a room polygon from its bounding surface planes."""
    from .factors import _opposed_pairs

    planes = [graph.wall_surfaces[sid].plane for sid in graph.rooms[room_id].surfaces]
    if len(planes) != 4:
        return None
    (a1, a2), (b1, b2) = _opposed_pairs(planes)
    corners = []
    for p in (a1, a2):
        for q in (b1, b2):
            mat = np.array([p.normal[:2], q.normal[:2]])
            if abs(np.linalg.det(mat)) < 1e-9:
                return None
            corners.append(np.linalg.solve(mat, np.array([p.dist, q.dist])))
    corners = np.array(corners)
    center = corners.mean(axis=0)
    order = np.argsort(np.arctan2(corners[:, 1] - center[1], corners[:, 0] - center[0]))
    return corners[order]


def _node_anchor(graph: LayeredGraph, node_id: str) -> np.ndarray | None:
    if node_id in graph.rooms:
        return np.asarray(graph.rooms[node_id].center, dtype=float)
    if node_id in graph.wall_surfaces:
        surface = graph.wall_surfaces[node_id]
        if surface.owner_room and surface.owner_room in graph.rooms:
            center = graph.rooms[surface.owner_room].center
            n = surface.plane.normal[:2]
            signed = float(center @ n) - surface.plane.dist
            return center - signed * n
        return surface.plane.closest_point[:2]
    return None


class _Scene:
    def __init__(self):
        self.elements: list[str] = []
        self.points: list[np.ndarray] = []

    def track(self, *pts):
        for p in pts:
            self.points.append(np.asarray(p, dtype=float)[:2])

    def line(self, a, b, cls):
        self.track(a, b)
        self.elements.append(
            f'<line class="{cls}" x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" '
            f'x2="{_fmt(b[0])}" y2="{_fmt(b[1])}"/>'
        )

    def polygon(self, pts, cls):
        self.track(*pts)
        coords = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in pts)
        self.elements.append(f'<polygon class="{cls}" points="{coords}"/>')

    def polyline(self, pts, cls):
        self.track(*pts)
        coords = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in pts)
        self.elements.append(f'<polyline class="{cls}" points="{coords}"/>')

    def circle(self, c, r, cls):
        self.track(c)
        self.elements.append(
            f'<circle class="{cls}" cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" r="{_fmt(r)}"/>'
        )


def _draw_graph(scene: _Scene, graph: LayeredGraph, offset: np.ndarray):
    for rid in sorted(graph.rooms):
        corners = _room_corners(graph, rid)
        if corners is not None:
            scene.polygon(corners + offset, "room")
    for sid in sorted(graph.wall_surfaces):
        surface = graph.wall_surfaces[sid]
        if surface.owner_room is None:
            continue  # synthetic exterior twins are bookkeeping, not geometry
        anchor = _node_anchor(graph, sid)
        if anchor is None:
            continue
        n = surface.plane.normal[:2]
        tangent = np.array([-n[1], n[0]])
        room = graph.rooms[surface.owner_room]
        corners = _room_corners(graph, surface.owner_room)
        ends = None
        if corners is not None:
            on_plane = [c for c in corners
                        if abs(float(c @ n) - surface.plane.dist) < 1e-6]
            if len(on_plane) == 2:
                ends = on_plane
        if ends is None:
            ends = (anchor - tangent, anchor + tangent)
        scene.line(ends[0] + offset, ends[1] + offset, "surface")
        center = np.asarray(room.center, dtype=float)
        signed = float(center @ n) - surface.plane.dist
        inward = n if signed > 0 else -n
        scene.line(anchor + offset, anchor + 0.3 * inward + offset, "tick")
    for did in sorted(graph.doorways):
        scene.circle(graph.doorways[did].position[:2] + offset, 0.18, "doorway")


def render_svg(agraph: LayeredGraph | None = None, sgraph: LayeredGraph | None = None,
               trajectory: np.ndarray | None = None,
               matches: MatchSet | None = None) -> str:
    """Render plan and/or observed graphs side by side as an SVG document."""
    scene = _Scene()
    a_offset = np.zeros(2)
    s_offset = np.zeros(2)
    if agraph is not None:
        _draw_graph(scene, agraph, a_offset)
    if sgraph is not None:
        if agraph is not None and scene.points:
            span = max(p[0] for p in scene.points) - min(p[0] for p in scene.points)
            s_offset = np.array([span + 4.0, 0.0])
        _draw_graph(scene, sgraph, s_offset)
    if trajectory is not None and len(trajectory):
        pts = np.asarray(trajectory, dtype=float)[:, :2] + s_offset
        scene.polyline(pts, "trajectory")
    if matches is not None and agraph is not None and sgraph is not None:
        for pair in matches.canonical():
            a = _node_anchor(agraph, pair.a_node)
            s = _node_anchor(sgraph, pair.s_node)
            if a is not None and s is not None:
                scene.line(a + a_offset, s + s_offset, "match")

    if scene.points:
        pts = np.array(scene.points)
        lo = pts.min(axis=0) - _MARGIN
        hi = pts.max(axis=0) + _MARGIN
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    width, height = hi - lo
    header = (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(lo[0])} {_fmt(lo[1])} {_fmt(width)} {_fmt(height)}">'
    )
    body = "".join(scene.elements)
    return f"{header}<style>{_STYLE}</style>{body}</svg>\n"
