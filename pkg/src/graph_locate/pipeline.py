"""End-to-end orchestration: observe, match until unique, merge, evaluate.

When simulating, rooms are revealed one at a time in the visiting order and
matching re-runs after every reveal, merging once the match is unique. A
rejected merge (gate violation) sends the loop back for more data. With an
ingested observation graph there is a single match/merge pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphLocateError, MatchRejected
from .evaluate import ApeStats, ape, landmark_rmse, pair_precision_recall, transform_error
from .graph import LayeredGraph
from .matching import MatchOutcome, MatchParams, MatchStatus, match
from .merge import ISGraph, MergeOptions, build_merge_problem, solve_merge
from .simulate import GroundTruth, SimConfig, simulate_sgraph


@dataclass
class PipelineResult:
    dataset: str
    status: MatchStatus
    outcome: MatchOutcome | None
    isgraph: ISGraph | None
    sgraph: LayeredGraph | None
    truth: GroundTruth | None
    rooms_revealed: int
    seed: int | None
    precision: float | None = None
    recall: float | None = None
    translation_error: float | None = None
    yaw_error: float | None = None
    ape_stats: ApeStats | None = None
    landmark_rmse: float | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def report_dict(self) -> dict:
        """Deterministic report content; timings are telemetry and live apart."""
        data = {
            "dataset": self.dataset,
            "status": self.status.value,
            "rooms_revealed": self.rooms_revealed,
            "seed": self.seed,
            "match": self.outcome.to_dict() if self.outcome else None,
            "precision": self.precision,
            "recall": self.recall,
            "translation_error": self.translation_error,
            "yaw_error": self.yaw_error,
            "ape": self.ape_stats.to_dict() if self.ape_stats else None,
            "landmark_rmse": self.landmark_rmse,
        }
        return data


def _stage(timings: dict, name: str, fn):
    start = time.perf_counter()
    try:
        result = fn()
    except GraphLocateError as err:
        err.stage = name
        raise
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start
    return result


def run_pipeline(agraph: LayeredGraph, *, sim_config: SimConfig | None = None,
                 sgraph: LayeredGraph | None = None, truth: GroundTruth | None = None,
                 params: MatchParams | None = None,
                 merge_options: MergeOptions | None = None,
                 dataset: str = "dataset") -> PipelineResult:
    """Run matching (and merging when unique) over an observation source.

    Exactly one of ``sim_config`` and ``sgraph`` must be given; ``truth``
    enables evaluation against ground truth in either mode.
    """
    if (sim_config is None) == (sgraph is None):
        raise ValueError("provide either sim_config or sgraph")
    params = params or MatchParams()
    merge_options = merge_options or MergeOptions()
    timings: dict[str, float] = {}

    outcome: MatchOutcome | None = None
    isgraph: ISGraph | None = None
    revealed = 0
    seed = sim_config.seed if sim_config else None

    if sim_config is not None:
        status = MatchStatus.NO_MATCH
        for k in range(1, len(sim_config.visited_rooms) + 1):
            revealed = k
            sgraph, truth = _stage(
                timings, "simulate",
                lambda cfg=sim_config.with_prefix(k): simulate_sgraph(agraph, cfg),
            )
            outcome = _stage(timings, "match", lambda g=sgraph: match(agraph, g, params))
            status = outcome.status
            if outcome.status is not MatchStatus.UNIQUE:
                continue
            try:
                isgraph = _stage(
                    timings, "merge",
                    lambda g=sgraph, o=outcome: solve_merge(
                        build_merge_problem(agraph, g, o.best, merge_options)
                    ),
                )
                break
            except MatchRejected:
                # gate feedback: distrust the match and await more information
                status = MatchStatus.AMBIGUOUS
                isgraph = None
    else:
        revealed = len(sgraph.rooms)
        outcome = _stage(timings, "match", lambda: match(agraph, sgraph, params))
        status = outcome.status
        if outcome.status is MatchStatus.UNIQUE:
            isgraph = _stage(
                timings, "merge",
                lambda: solve_merge(build_merge_problem(agraph, sgraph, outcome.best,
                                                        merge_options)),
            )

    result = PipelineResult(dataset, status, outcome, isgraph, sgraph, truth,
                            revealed, seed, timings=timings)
    if truth is not None:
        _evaluate(result, agraph, timings)
    return result


def _evaluate(result: PipelineResult, agraph: LayeredGraph, timings: dict):
    def compute():
        truth = result.truth
        if result.outcome and result.outcome.best is not None:
            result.precision, result.recall = pair_precision_recall(
                result.outcome.best, truth.pair_set()
            )
        if result.isgraph is not None:
            result.translation_error, result.yaw_error = transform_error(
                result.isgraph.transform, truth.transform
            )
            estimated = np.array([
                kf.pose for kf in result.isgraph.graph.keyframes_in_order()
            ])
            truth_b = np.array([
                truth.transform.apply_pose(pose) for pose in truth.trajectory
            ])
            result.ape_stats = ape(estimated, truth_b)
            result.landmark_rmse = landmark_rmse(result.isgraph, agraph)

    _stage(timings, "evaluate", compute)
