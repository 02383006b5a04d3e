"""Hierarchical match-candidates graph: rooms on top, wall surfaces at the leaves.

The tree alternates set-nodes and pair-nodes. Top-down construction keeps
only suitable combinations: every pair passes the categorical check (same
node kind, four-wall rooms only), the structural check (surface pairs live
under their parent room pair), and the affinity checks (intralevel pairwise
consistency, plus the interlevel gate against the parent pair). Axis labels
are deliberately not compared across frames: a quarter-turn between the
frames legitimately swaps X and Y walls.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from ..graph import LayeredGraph
from .affinity import AffinityMatrix, GraphConsistency, build_affinity
from .densest import solve_densest
from .pairs import MatchLevel, MatchPair, MatchSet, is_injective
from .params import MatchParams


@dataclass(frozen=True)
class CandidateGraph:
    """Alternating tree of alternatives, flattened into per-level collections.

    ``room_sets`` are the room-level set-node alternatives; ``leaf_sets``
    maps each room pair to its surface-level set-node alternatives.
    """

    room_pairs: tuple[MatchPair, ...]
    room_sets: tuple[MatchSet, ...]
    leaf_sets: dict[MatchPair, tuple[MatchSet, ...]] = field(default_factory=dict)
    room_affinity: AffinityMatrix | None = None
    overflowed: bool = False
    note: str = ""

    @property
    def empty(self) -> bool:
        return not self.room_sets

    def combination_count(self) -> int:
        total = 0
        for room_set in self.room_sets:
            product = 1
            for pair in sorted(room_set.pairs):
                product *= max(1, len(self.leaf_sets.get(pair, ())))
            total += product
        return total


def _maximal_cliques(affinity: AffinityMatrix) -> list[tuple[int, ...]]:
    """All maximal mutually-consistent index sets, sorted canonically."""
    n = len(affinity)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    m = affinity.matrix
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] > 0.0:
                graph.add_edge(i, j)
    cliques = [tuple(sorted(c)) for c in nx.find_cliques(graph)]
    return sorted(cliques)


def _set_alternatives(affinity: AffinityMatrix, floor_ratio: float,
                      cap: int) -> tuple[list[tuple[int, ...]], bool]:
    """Set-node alternatives: the densest selection plus every maximal clique
    whose density clears the floor relative to the best."""
    if len(affinity) == 0:
        return [], False
    densest, best_density = solve_densest(affinity.matrix)
    alternatives = {densest} if densest else set()
    for clique in _maximal_cliques(affinity):
        density = affinity.density(clique)
        best_density = max(best_density, density)
        alternatives.add(clique)
    floor = floor_ratio * best_density
    kept = [c for c in alternatives if affinity.density(c) >= floor]
    kept.sort(key=lambda c: (-affinity.density(c), c))
    return kept[:cap], len(kept) > cap


def build_candidate_graph(agraph: LayeredGraph, sgraph: LayeredGraph,
                          params: MatchParams | None = None) -> CandidateGraph:
    """Enumerate suitable room and surface associations, top-down."""
    params = params or MatchParams()
    scorer = GraphConsistency(agraph, sgraph, params)

    a_rooms = scorer.matchable_rooms(True)
    s_rooms = scorer.matchable_rooms(False)
    room_pairs = tuple(
        MatchPair(MatchLevel.ROOM, a, s) for a in a_rooms for s in s_rooms
    )
    if not room_pairs:
        return CandidateGraph((), (), {}, None, note="no four-wall rooms to pair")

    # surface-level alternatives under each room pair; pairs without any
    # consistent surface assignment are unsuitable and pruned
    leaf_sets: dict[MatchPair, tuple[MatchSet, ...]] = {}
    for room_pair in room_pairs:
        leaves = _surface_alternatives(scorer, room_pair, params)
        if leaves:
            leaf_sets[room_pair] = leaves
    surviving = tuple(p for p in room_pairs if p in leaf_sets)
    if not surviving:
        return CandidateGraph((), (), {}, None, note="no surface-consistent room pairs")

    room_affinity = build_affinity(surviving, scorer.rooms)
    alternatives, truncated = _set_alternatives(
        room_affinity, params.mnode_floor_ratio, params.max_room_sets
    )
    room_sets = tuple(
        MatchSet(frozenset(room_affinity.pairs[i] for i in indices), MatchLevel.ROOM)
        for indices in alternatives
    )

    cg = CandidateGraph(surviving, room_sets, leaf_sets, room_affinity,
                        overflowed=truncated,
                        note="room-set alternatives truncated" if truncated else "")
    if cg.combination_count() > params.max_combinations:
        return CandidateGraph(surviving, room_sets, leaf_sets, room_affinity, True,
                              f"{cg.combination_count()} combinations exceed the "
                              f"{params.max_combinations} cap")
    return cg


def _surface_alternatives(scorer: GraphConsistency, room_pair: MatchPair,
                          params: MatchParams) -> tuple[MatchSet, ...]:
    """Consistent surface pairings between the two rooms of one room pair."""
    a_surfaces = scorer.agraph.rooms[room_pair.a_node].surfaces
    s_surfaces = scorer.sgraph.rooms[room_pair.s_node].surfaces
    pairs = []
    for a_sid in a_surfaces:
        for s_sid in s_surfaces:
            pair = MatchPair(MatchLevel.WALL_SURFACE, a_sid, s_sid)
            if scorer.interlevel(pair, room_pair) > 0.0:
                pairs.append(pair)
    if not pairs:
        return ()
    affinity = build_affinity(pairs, scorer.surfaces)
    cliques = _maximal_cliques(affinity)
    # only the most complete surface assignments are worth branching on;
    # smaller cliques are fragments of these under the injectivity structure
    top = max(len(c) for c in cliques)
    cliques = [c for c in cliques if len(c) == top]
    cliques.sort(key=lambda c: (-affinity.density(c), c))
    kept = cliques[:params.max_alternatives_per_room_pair]
    return tuple(
        MatchSet(frozenset(affinity.pairs[i] for i in clique), MatchLevel.WALL_SURFACE)
        for clique in kept
    )


def combine_candidates(cg: CandidateGraph) -> list[MatchSet]:
    """Bottom-up aggregation into flattened all-level candidates.

    Children of set-nodes are joint (their choices union), children of
    pair-nodes are alternatives (one leaf set chosen per pair). Combinations
    breaking two-way injectivity are dropped.
    """
    if cg.overflowed:
        return []
    candidates: list[MatchSet] = []
    seen: set[frozenset[MatchPair]] = set()
    for room_set in cg.room_sets:
        members = sorted(room_set.pairs)
        options = [
            [frozenset({pair}) | leaf.pairs for leaf in cg.leaf_sets.get(pair, ())]
            for pair in members
        ]
        for choice in itertools.product(*options):
            flat = frozenset().union(*choice) if choice else frozenset()
            if not flat or flat in seen:
                continue
            seen.add(flat)
            if not is_injective(flat):
                continue
            candidates.append(MatchSet(flat))
    candidates.sort(key=MatchSet.canonical)
    return candidates
