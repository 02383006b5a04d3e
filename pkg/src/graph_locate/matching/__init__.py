"""Hierarchical graph matching between plan graphs and observed graphs."""

from .affinity import (AffinityMatrix, GraphConsistency, build_affinity,
                       distance_kernel, pair_consistency_point_normals,
                       pair_consistency_points)
from .candidates import CandidateGraph, build_candidate_graph, combine_candidates
from .densest import solve_densest
from .pairs import MatchLevel, MatchPair, MatchSet, is_injective
from .params import MatchParams
from .select import MatchOutcome, MatchStatus, match, select_global

__all__ = [
    "AffinityMatrix",
    "CandidateGraph",
    "GraphConsistency",
    "MatchLevel",
    "MatchOutcome",
    "MatchPair",
    "MatchParams",
    "MatchSet",
    "MatchStatus",
    "build_affinity",
    "build_candidate_graph",
    "combine_candidates",
    "distance_kernel",
    "is_injective",
    "match",
    "pair_consistency_point_normals",
    "pair_consistency_points",
    "select_global",
    "solve_densest",
]
