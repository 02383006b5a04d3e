"""Evaluation metrics: trajectory error, transform error, landmark error."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvalError
from .frames import FrameTransform, wrap_angle
from .graph import LayeredGraph
from .matching.pairs import MatchLevel, MatchSet
from .merge import ISGraph


@dataclass(frozen=True)
class ApeStats:
    rmse: float
    mean: float
    max: float
    count: int

    def to_dict(self) -> dict:
        return {"rmse": self.rmse, "mean": self.mean, "max": self.max, "count": self.count}


def ape(estimated: np.ndarray, truth: np.ndarray) -> ApeStats:
    """Absolute pose error between index-aligned planar trajectories.

    Both trajectories must already be expressed in the same frame; the merge
    itself is the alignment, so no extra fitting happens here. Errors are
    translational, per pose.
    """
    estimated = np.asarray(estimated, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimated.shape[0] != truth.shape[0]:
        raise EvalError(
            f"trajectory lengths differ: {estimated.shape[0]} vs {truth.shape[0]}"
        )
    if estimated.shape[0] == 0:
        raise EvalError("empty trajectories")
    errors = np.linalg.norm(estimated[:, :2] - truth[:, :2], axis=1)
    return ApeStats(
        rmse=float(np.sqrt(np.mean(errors ** 2))),
        mean=float(np.mean(errors)),
        max=float(np.max(errors)),
        count=len(errors),
    )


def transform_error(estimated: FrameTransform, truth: FrameTransform) -> tuple[float, float]:
    """(translation error in meters, absolute yaw error in radians)."""
    dt = float(np.linalg.norm(estimated.translation - truth.translation))
    dy = abs(wrap_angle(estimated.yaw - truth.yaw))
    return dt, dy


def pair_precision_recall(found: MatchSet | None,
                          truth_pairs: set[tuple[str, str]]) -> tuple[float, float]:
    """Pair-level precision and recall of a match against the true correspondence."""
    if found is None or not found.pairs:
        return 0.0, 0.0
    got = found.as_id_pairs()
    hit = len(got & truth_pairs)
    return hit / len(got), hit / len(truth_pairs) if truth_pairs else 0.0


def landmark_rmse(isgraph: ISGraph, agraph: LayeredGraph) -> float:
    """RMSE of matched landmark positions after merging, all in the plan frame.

    Stands in for map-to-model cloud comparisons: room centers compare
    directly, wall surfaces by the distance between the plan plane and the
    re-expressed observed plane measured at the plan anchor.
    """
    merged = isgraph.graph
    errors = []
    for pair in sorted(isgraph.matches.pairs):
        if pair.level is MatchLevel.ROOM:
            errors.append(float(np.linalg.norm(
                merged.rooms[pair.s_node].center - agraph.rooms[pair.a_node].center
            )))
        else:
            plan = agraph.wall_surfaces[pair.a_node].plane
            observed = merged.wall_surfaces[pair.s_node].plane
            anchor = plan.closest_point
            errors.append(abs(observed.signed_distance(anchor)))
    if not errors:
        return math.nan
    return float(np.sqrt(np.mean(np.square(errors))))
