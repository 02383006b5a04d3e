"""Global candidate scoring, symmetry clustering and the match entry point.

Every flattened candidate is scored by the density of the full surface-level
affinity matrix restricted to its leaf pairs, so incoherence between rooms
(not visible inside any single room) drags the score down. Scores cluster
by a relative-gap rule; a unique outcome needs the top cluster to contain a
single room-level assignment AND that assignment's best surface realization
to beat its runner-up by the tie margin, because a tied realization (e.g.
the half-turn of a lone rectangular room) leaves the frame transform
ambiguous even when the room identity is settled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..graph import LayeredGraph
from .affinity import GraphConsistency, build_affinity
from .candidates import build_candidate_graph, combine_candidates
from .pairs import MatchLevel, MatchPair, MatchSet
from .params import MatchParams


class MatchStatus(Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class MatchOutcome:
    status: MatchStatus
    best: MatchSet | None
    score: float
    cluster_sizes: tuple[int, ...]
    note: str = ""

    def to_dict(self) -> dict:
        pairs = {"rooms": [], "wall_surfaces": []}
        if self.best is not None:
            for p in self.best.canonical():
                key = "rooms" if p.level is MatchLevel.ROOM else "wall_surfaces"
                pairs[key].append([p.a_node, p.s_node])
        return {
            "status": self.status.value,
            "score": self.score,
            "cluster_sizes": list(self.cluster_sizes),
            "pairs": pairs,
            "note": self.note,
        }


def _no_match(note: str = "") -> MatchOutcome:
    return MatchOutcome(MatchStatus.NO_MATCH, None, 0.0, (), note)


def select_global(candidates: list[MatchSet], agraph: LayeredGraph,
                  sgraph: LayeredGraph, params: MatchParams | None = None) -> MatchOutcome:
    """Rank flattened candidates by global affinity and detect symmetries."""
    params = params or MatchParams()
    if not candidates:
        return _no_match("no candidates")

    scorer = GraphConsistency(agraph, sgraph, params)
    registry = sorted({p for c in candidates for p in c.at_level(MatchLevel.WALL_SURFACE)})
    affinity = build_affinity(registry, scorer.surfaces)
    index = {pair: i for i, pair in enumerate(affinity.pairs)}

    def score(candidate: MatchSet) -> float:
        leafs = candidate.at_level(MatchLevel.WALL_SURFACE)
        return affinity.density(index[p] for p in leafs)

    scored = sorted(
        ((score(c), c) for c in candidates),
        key=lambda sc: (-sc[0], sc[1].canonical()),
    )

    # aggregate surface-level realizations of the same room assignment
    groups: dict[tuple, list[tuple[float, MatchSet]]] = {}
    order: list[tuple] = []
    for s, candidate in scored:
        key = candidate.room_key()
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append((s, candidate))

    group_scores = [groups[key][0][0] for key in order]
    clusters = _gap_clusters(group_scores, params.cluster_gap_ratio)
    top_score, top_candidate = groups[order[0]][0]

    if len(clusters[0]) > 1:
        return MatchOutcome(MatchStatus.AMBIGUOUS, None, top_score,
                            tuple(len(c) for c in clusters),
                            "multiple room assignments in the top cluster")

    realizations = groups[order[0]]
    if len(realizations) > 1:
        runner_score, runner = realizations[1]
        if runner.pairs != top_candidate.pairs and \
                runner_score >= top_score * (1.0 - params.tie_fraction):
            return MatchOutcome(MatchStatus.AMBIGUOUS, None, top_score,
                                tuple(len(c) for c in clusters),
                                "surface assignment of the best room match is ambiguous")

    return MatchOutcome(MatchStatus.UNIQUE, top_candidate, top_score,
                        tuple(len(c) for c in clusters))


def _gap_clusters(scores: list[float], gap_ratio: float) -> list[list[float]]:
    """Split descending scores into clusters at relative gaps above the ratio."""
    clusters: list[list[float]] = [[scores[0]]]
    for prev, cur in zip(scores, scores[1:]):
        boundary = cur <= 0.0 or (prev / cur) > gap_ratio
        if boundary:
            clusters.append([cur])
        else:
            clusters[-1].append(cur)
    return clusters


def match(agraph: LayeredGraph, sgraph: LayeredGraph,
          params: MatchParams | None = None) -> MatchOutcome:
    """Full matching stage: candidates, combination, global selection."""
    params = params or MatchParams()
    cg = build_candidate_graph(agraph, sgraph, params)
    if cg.overflowed:
        return MatchOutcome(MatchStatus.AMBIGUOUS, None, 0.0, (),
                            cg.note or "candidate explosion")
    if cg.empty:
        return _no_match(cg.note or "empty candidate graph")
    candidates = combine_candidates(cg)
    if not candidates:
        return _no_match("no injective combination")
    return select_global(candidates, agraph, sgraph, params)
