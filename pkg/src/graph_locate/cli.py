"""Command-line entry point.

Exit codes are a stable scripting contract: 0 success, 2 ambiguous or
no-match outcome, 3 invalid input, 4 solver failure. The environment
variable GRAPH_LOCATE_SEED overrides any seed found in config files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .datasets import random_transform, suite_plans
from .errors import (DegenerateProblem, GraphLocateError, MatchRejected,
                     SolveFailed)
from .evaluate import ape  # noqa: F401  (re-exported for scripting)
from .floorplan import build_agraph, floorplan_from_dict, floorplan_to_dict
from .graph_io import dump_json, load_graph, load_json, save_graph
from .matching import MatchLevel, MatchPair, MatchParams, MatchSet, MatchStatus, match
from .merge import MergeOptions, build_merge_problem, solve_merge
from .pipeline import run_pipeline
from .render import render_svg
from .simulate import (ground_truth_from_dict, ground_truth_to_dict, ingest_sgraph,
                       sim_config_from_dict, sim_config_to_dict, simulate_sgraph)

EXIT_OK = 0
EXIT_UNDECIDED = 2
EXIT_INPUT = 3
EXIT_SOLVER = 4


def _env_seed() -> int | None:
    raw = os.environ.get("GRAPH_LOCATE_SEED")
    return int(raw) if raw else None


def _load_params(path: str | None) -> MatchParams:
    if path is None:
        return MatchParams()
    return MatchParams.from_dict(load_json(path))


def _load_matches(path: str) -> MatchSet:
    data = load_json(path)
    pairs = set()
    for a, s in data.get("rooms", []):
        pairs.add(MatchPair(MatchLevel.ROOM, a, s))
    for a, s in data.get("wall_surfaces", []):
        pairs.add(MatchPair(MatchLevel.WALL_SURFACE, a, s))
    return MatchSet(frozenset(pairs))


def _write_or_print(data: dict, path: str | None):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def _cmd_agraph(args) -> int:
    if args.action != "build":
        raise GraphLocateError(f"unknown agraph action {args.action!r}")
    spec = floorplan_from_dict(load_json(args.spec))
    graph = build_agraph(spec)
    save_graph(graph, args.output)
    print(f"wrote plan graph with {len(graph.rooms)} rooms, "
          f"{len(graph.wall_surfaces)} surfaces to {args.output}")
    return EXIT_OK


def _cmd_sgraph(args) -> int:
    if args.action != "simulate":
        raise GraphLocateError(f"unknown sgraph action {args.action!r}")
    agraph = load_graph(args.agraph).validate_profile("agraph")
    cfg = sim_config_from_dict(load_json(args.config))
    seed = _env_seed()
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    sgraph, truth = simulate_sgraph(agraph, cfg)
    save_graph(sgraph, args.output)
    if args.truth:
        dump_json(ground_truth_to_dict(truth), args.truth)
    print(f"wrote observed graph with {len(sgraph.rooms)} rooms to {args.output}")
    return EXIT_OK


def _cmd_match(args) -> int:
    agraph = load_graph(args.agraph).validate_profile("agraph")
    sgraph = ingest_sgraph(args.sgraph)
    outcome = match(agraph, sgraph, _load_params(args.params))
    _write_or_print(outcome.to_dict(), args.output)
    return EXIT_OK if outcome.status is MatchStatus.UNIQUE else EXIT_UNDECIDED


def _cmd_merge(args) -> int:
    agraph = load_graph(args.agraph).validate_profile("agraph")
    sgraph = ingest_sgraph(args.sgraph)
    matches = _load_matches(args.matches)
    options = MergeOptions(refine_landmarks=args.refine)
    isgraph = solve_merge(build_merge_problem(agraph, sgraph, matches, options))
    _write_or_print(isgraph.to_dict(), args.output)
    if args.trace:
        lines = ["iteration,cost,damping"]
        lines += [f"{i},{c!r},{d!r}" for i, c, d in isgraph.trace]
        Path(args.trace).write_text("\n".join(lines) + "\n")
    return EXIT_OK


def _run_one_pipeline(args, agraph, sim_cfg, sgraph, truth, dataset):
    params = _load_params(args.params)
    return run_pipeline(agraph, sim_config=sim_cfg, sgraph=sgraph, truth=truth,
                        params=params, dataset=dataset)


def _cmd_pipeline(args) -> int:
    agraph = load_graph(args.agraph).validate_profile("agraph")
    sim_cfg = sgraph = truth = None
    if args.sim:
        sim_cfg = sim_config_from_dict(load_json(args.sim))
        seed = _env_seed()
        if seed is not None:
            sim_cfg = dataclasses.replace(sim_cfg, seed=seed)
    elif args.sgraph:
        sgraph = ingest_sgraph(args.sgraph)
        if args.truth:
            truth = ground_truth_from_dict(load_json(args.truth))
    else:
        raise GraphLocateError("pipeline needs --sim or --sgraph")

    result = _run_one_pipeline(args, agraph, sim_cfg, sgraph, truth, args.dataset)
    _write_or_print(result.report_dict(), args.output)
    if args.timings:
        dump_json({k: round(v, 6) for k, v in result.timings.items()}, args.timings)
    if args.isgraph and result.isgraph is not None:
        dump_json(result.isgraph.to_dict(), args.isgraph)
    if args.render:
        svg = render_svg(
            agraph, result.sgraph,
            trajectory=result.truth.trajectory if result.truth else None,
            matches=result.outcome.best if result.outcome else None,
        )
        Path(args.render).write_text(svg)
    return EXIT_OK if result.status is MatchStatus.UNIQUE else EXIT_UNDECIDED


def _cmd_eval_suite(args) -> int:
    root = Path(args.directory)
    manifests = sorted(root.glob("*/manifest.json"))
    if not manifests:
        raise GraphLocateError(f"no dataset manifests under {root}")

    def run(manifest: Path):
        data = load_json(manifest)
        agraph = load_graph(manifest.parent / data["agraph"]).validate_profile("agraph")
        sim_cfg = sim_config_from_dict(load_json(manifest.parent / data["sim"]))
        seed = _env_seed()
        if seed is not None:
            sim_cfg = dataclasses.replace(sim_cfg, seed=seed)
        result = run_pipeline(agraph, sim_config=sim_cfg,
                              params=_load_params(args.params),
                              dataset=manifest.parent.name)
        return result.report_dict()

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        reports = list(pool.map(run, manifests))
    reports.sort(key=lambda r: r["dataset"])
    _write_or_print({"datasets": reports}, args.output)
    bad = [r for r in reports if r["status"] != "unique"]
    return EXIT_UNDECIDED if bad else EXIT_OK


def _cmd_dataset(args) -> int:
    if args.action != "suite":
        raise GraphLocateError(f"unknown dataset action {args.action!r}")
    seed = _env_seed() if _env_seed() is not None else args.seed
    root = Path(args.output)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for name, plan, transform in suite_plans(seed):
        folder = root / name
        folder.mkdir(exist_ok=True)
        dump_json(floorplan_to_dict(plan), folder / "floorplan.json")
        graph = build_agraph(plan)
        save_graph(graph, folder / "agraph.json")
        cfg = {
            "true_transform": {"translation": list(transform.translation),
                               "yaw": transform.yaw},
            "visited_rooms": [r.id for r in plan.rooms],
            "noise_plane_dist": args.noise_dist,
            "noise_plane_angle": args.noise_angle,
            "odom_step": 0.5,
            "odom_noise": [0.005, 0.001],
            "seed": int(rng.integers(0, 2**31 - 1)),
        }
        dump_json(cfg, folder / "sim.json")
        dump_json({"agraph": "agraph.json", "sim": "sim.json"},
                  folder / "manifest.json")
    print(f"wrote 6-dataset suite to {root}")
    return EXIT_OK


def _cmd_render(args) -> int:
    agraph = load_graph(args.agraph) if args.agraph else None
    sgraph = load_graph(args.sgraph) if args.sgraph else None
    trajectory = None
    if args.truth:
        trajectory = ground_truth_from_dict(load_json(args.truth)).trajectory
    matches = _load_matches(args.matches) if args.matches else None
    svg = render_svg(agraph, sgraph, trajectory=trajectory, matches=matches)
    Path(args.output).write_text(svg)
    print(f"wrote {args.output}")
    return EXIT_OK


# -- argument wiring -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graph-locate",
        description="Global localization from architectural plans via graph matching",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("agraph", help="build a plan graph from a floorplan spec")
    p.add_argument("action", choices=["build"])
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_agraph)

    p = sub.add_parser("sgraph", help="simulate an observed graph")
    p.add_argument("action", choices=["simulate"])
    p.add_argument("agraph")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--truth")
    p.set_defaults(fn=_cmd_sgraph)

    p = sub.add_parser("match", help="match an observed graph against a plan graph")
    p.add_argument("agraph")
    p.add_argument("sgraph")
    p.add_argument("-p", "--params")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_match)

    p = sub.add_parser("merge", help="merge graphs given a match set")
    p.add_argument("agraph")
    p.add_argument("sgraph")
    p.add_argument("--matches", required=True)
    p.add_argument("--refine", action="store_true")
    p.add_argument("--trace")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_merge)

    p = sub.add_parser("pipeline", help="end-to-end run with incremental reveal")
    p.add_argument("agraph")
    p.add_argument("--sim")
    p.add_argument("--sgraph")
    p.add_argument("--truth")
    p.add_argument("-p", "--params")
    p.add_argument("-o", "--output")
    p.add_argument("--timings")
    p.add_argument("--isgraph")
    p.add_argument("--render")
    p.add_argument("--dataset", default="dataset")
    p.set_defaults(fn=_cmd_pipeline)

    p = sub.add_parser("eval-suite", help="run every dataset under a directory")
    p.add_argument("directory")
    p.add_argument("-p", "--params")
    p.add_argument("-o", "--output")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(fn=_cmd_eval_suite)

    p = sub.add_parser("dataset", help="generate benchmark datasets")
    p.add_argument("action", choices=["suite"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=20240811)
    p.add_argument("--noise-dist", type=float, default=0.05)
    p.add_argument("--noise-angle", type=float, default=0.01)
    p.set_defaults(fn=_cmd_dataset)

    p = sub.add_parser("render", help="render graphs to SVG")
    p.add_argument("--agraph")
    p.add_argument("--sgraph")
    p.add_argument("--truth")
    p.add_argument("--matches")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (DegenerateProblem, SolveFailed, MatchRejected) as err:
        stage = f" [{err.stage}]" if err.stage else ""
        print(f"solver failure{stage}: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except GraphLocateError as err:
        stage = f" [{err.stage}]" if err.stage else ""
        print(f"input error{stage}: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
