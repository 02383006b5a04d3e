"""Pairwise geometric-consistency scores between candidate associations.

Consistency only ever compares quantities measured inside one graph with
the same quantities measured inside the other, so scores are invariant to
the unknown rigid transform between the frames. Wall surfaces are treated
as point-normals anchored at the projection of their room center onto the
surface plane, with the normal oriented into the room; both are intrinsic
to the scene, unlike the raw origin-relative closest point, which slides
along the plane when the frame moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..entities import RoomKind
from ..frames import wrap_angle
from ..graph import LayeredGraph
from ..planes import signed_angle_between
from .pairs import MatchLevel, MatchPair
from .params import MatchParams


def distance_kernel(e: float, sigma: float, eps: float) -> float:
    """Truncated Gaussian kernel on a non-negative disagreement ``e``."""
    if e > eps:
        return 0.0
    return math.exp(-(e * e) / (2.0 * sigma * sigma))


def pair_consistency_points(a_i, a_j, s_i, s_j, sigma: float, eps: float) -> float:
    """Consistency of two point associations: intra-graph distances must agree."""
    da = float(np.linalg.norm(np.asarray(a_i) - np.asarray(a_j)))
    ds = float(np.linalg.norm(np.asarray(s_i) - np.asarray(s_j)))
    return distance_kernel(abs(da - ds), sigma, eps)


def pair_consistency_point_normals(pa_i, na_i, pa_j, na_j, ps_i, ns_i, ps_j, ns_j,
                                   sigma: float, eps: float, eps_normal: float) -> float:
    """Consistency of two point-normal associations.

    The distance term is the point kernel on the anchor points; it is gated
    to zero unless the signed relative normal angles agree within
    ``eps_normal``. Signed angles (about +z) also reject mirror-image
    assignments that unsigned angles cannot see.
    """
    rel_a = signed_angle_between(np.asarray(na_i), np.asarray(na_j))
    rel_s = signed_angle_between(np.asarray(ns_i), np.asarray(ns_j))
    if abs(wrap_angle(rel_a - rel_s)) > eps_normal:
        return 0.0
    return pair_consistency_points(pa_i, pa_j, ps_i, ps_j, sigma, eps)


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric pairwise consistency scores over a registry of pairs."""

    pairs: tuple[MatchPair, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float).copy()
        n = len(self.pairs)
        if m.shape != (n, n):
            raise ValueError(f"matrix must be {n}x{n}, got {m.shape}")
        if n and np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("affinity matrix must be symmetric")
        if n and (np.min(m) < 0.0 or np.max(m) > 1.0 + 1e-12):
            raise ValueError("affinities must lie in [0, 1]")
        if n and np.max(np.abs(np.diag(m) - 1.0)) > 1e-12:
            raise ValueError("diagonal must be 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def index_of(self, pair: MatchPair) -> int:
        return self.pairs.index(pair)

    def density(self, indices) -> float:
        """Mean total affinity of a selection: u'Au / u'u for its indicator u."""
        idx = np.fromiter(indices, dtype=int)
        if idx.size == 0:
            return 0.0
        sub = self.matrix[np.ix_(idx, idx)]
        return float(sub.sum() / idx.size)


def build_affinity(pairs, scorer) -> AffinityMatrix:
    """Build a matrix from ``scorer(pair_i, pair_j)``; diagonal is fixed at 1."""
    pairs = tuple(pairs)
    n = len(pairs)
    m = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = scorer(pairs[i], pairs[j])
    return AffinityMatrix(pairs, m)


def shares_endpoint(p: MatchPair, q: MatchPair) -> bool:
    return p.a_node == q.a_node or p.s_node == q.s_node


class GraphConsistency:
    """Consistency scorer bound to a concrete plan graph / observed graph pair."""

    def __init__(self, agraph: LayeredGraph, sgraph: LayeredGraph, params: MatchParams):
        self.agraph = agraph
        self.sgraph = sgraph
        self.params = params
        self._anchor_cache: dict[tuple[bool, str], tuple[np.ndarray, np.ndarray]] = {}

    # -- geometry lookups ---------------------------------------------------

    def room_center(self, a_side: bool, room_id: str) -> np.ndarray:
        graph = self.agraph if a_side else self.sgraph
        return graph.rooms[room_id].center

    def surface_anchor(self, a_side: bool, surface_id: str) -> tuple[np.ndarray, np.ndarray]:
        """(anchor point, inward unit normal) of a room-owned wall surface.

        The anchor is the foot of the perpendicular from the owning room's
        center; the normal points from the plane toward that center.
        """
        key = (a_side, surface_id)
        cached = self._anchor_cache.get(key)
        if cached is not None:
            return cached
        graph = self.agraph if a_side else self.sgraph
        surface = graph.wall_surfaces[surface_id]
        if surface.owner_room is None:
            raise ValueError(f"surface {surface_id} has no owning room")
        center = graph.rooms[surface.owner_room].center
        n = surface.plane.normal[:2]
        signed = float(center @ n) - surface.plane.dist
        anchor = center - signed * n
        inward = n if signed > 0 else -n
        result = (anchor, inward)
        self._anchor_cache[key] = result
        return result

    # -- pair scores ----------------------------------------------------------

    def rooms(self, m_i: MatchPair, m_j: MatchPair) -> float:
        if shares_endpoint(m_i, m_j):
            return 0.0
        return pair_consistency_points(
            self.room_center(True, m_i.a_node), self.room_center(True, m_j.a_node),
            self.room_center(False, m_i.s_node), self.room_center(False, m_j.s_node),
            self.params.sigma_consistency, self.params.eps_consistency,
        )

    def surfaces(self, m_i: MatchPair, m_j: MatchPair) -> float:
        if shares_endpoint(m_i, m_j):
            return 0.0
        pa_i, na_i = self.surface_anchor(True, m_i.a_node)
        pa_j, na_j = self.surface_anchor(True, m_j.a_node)
        ps_i, ns_i = self.surface_anchor(False, m_i.s_node)
        ps_j, ns_j = self.surface_anchor(False, m_j.s_node)
        return pair_consistency_point_normals(
            pa_i, na_i, pa_j, na_j, ps_i, ns_i, ps_j, ns_j,
            self.params.sigma_consistency, self.params.eps_consistency,
            self.params.eps_normal,
        )

    def interlevel(self, surface_pair: MatchPair, room_pair: MatchPair) -> float:
        """Consistency of a surface association with its parent room association.

        The room center's distance to the surface plane must agree across
        graphs; the center-to-anchor offset always runs along the inward
        normal on both sides, so the distance term carries the information.
        """
        pa, _ = self.surface_anchor(True, surface_pair.a_node)
        ps, _ = self.surface_anchor(False, surface_pair.s_node)
        da = float(np.linalg.norm(self.room_center(True, room_pair.a_node) - pa))
        ds = float(np.linalg.norm(self.room_center(False, room_pair.s_node) - ps))
        return distance_kernel(abs(da - ds), self.params.sigma_consistency,
                               self.params.eps_consistency)

    # -- categorical helpers --------------------------------------------------

    def matchable_rooms(self, a_side: bool) -> list[str]:
        graph = self.agraph if a_side else self.sgraph
        return [r.id for r in graph.rooms.values() if r.kind is RoomKind.FOUR_WALL]

    def score_pair(self, m_i: MatchPair, m_j: MatchPair) -> float:
        if m_i.level is not m_j.level:
            raise ValueError("pairs must share a level for intralevel affinity")
        if m_i.level is MatchLevel.ROOM:
            return self.rooms(m_i, m_j)
        return self.surfaces(m_i, m_j)
