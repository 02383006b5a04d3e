"""Tunable constants of the matching stage."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MatchParams:
    """Kernel widths, gates and combinatorial caps.

    sigma_consistency / eps_consistency shape the truncated Gaussian kernel
    on pairwise-distance disagreement (meters); eps_normal gates relative
    normal-angle disagreement (radians). Cluster constants control how
    candidate scores split into tie groups.
    """

    sigma_consistency: float = 0.3
    eps_consistency: float = 0.8
    eps_normal: float = 0.15
    mnode_floor_ratio: float = 0.6
    cluster_gap_ratio: float = 1.25
    tie_fraction: float = 0.02
    max_combinations: int = 10_000
    max_room_sets: int = 512
    max_alternatives_per_room_pair: int = 8

    def to_dict(self) -> dict:
        return {
            "sigma_consistency": self.sigma_consistency,
            "eps_consistency": self.eps_consistency,
            "eps_normal": self.eps_normal,
            "mnode_floor_ratio": self.mnode_floor_ratio,
            "cluster_gap_ratio": self.cluster_gap_ratio,
            "tie_fraction": self.tie_fraction,
            "max_combinations": self.max_combinations,
            "max_room_sets": self.max_room_sets,
            "max_alternatives_per_room_pair": self.max_alternatives_per_room_pair,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchParams":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        return cls(**known)
