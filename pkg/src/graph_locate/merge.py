"""Fuse matched graphs by estimating the map-to-plan transform.

Cross-graph constraints tie matched room centers (point residuals) and
matched wall surfaces (minimal angle/distance plane residuals) together;
Levenberg-Marquardt with a Huber kernel minimizes the robustified sum of
squares over the planar transform, optionally refining the observed-side
landmarks as well. The plan side is always held fixed: the plan defines
the target frame.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .entities import Floor, Keyframe, Room, WallSurface
from .errors import DegenerateProblem, MatchRejected, SolveFailed
from .factors import FactorKind, FactorResidual, InformationConfig, information_for
from .frames import FrameId, FrameTransform, wrap_angle
from .graph import LayeredGraph
from .matching.pairs import MatchLevel, MatchSet
from .planes import PlaneCP, plane_cp, transform_plane

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MergeOptions:
    refine_landmarks: bool = False
    huber_delta: float = 0.5
    gate_dist: float = 0.3
    gate_angle: float = 0.2
    max_iterations: int = 100
    relative_tolerance: float = 1e-10
    cost_floor: float = 1e-26
    initial_damping: float = 1e-4
    damping_factor: float = 10.0
    max_damping: float = 1e12


# -- residuals -----------------------------------------------------------------


def _rot(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s], [s, c]])


def _drot(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[-s, -c], [c, -s]])


def room_merge_residual(room_b: Room, room_m: Room, transform: FrameTransform) -> np.ndarray:
    """Plan room center minus the transformed observed room center."""
    assert room_b.frame is FrameId.B and room_m.frame is FrameId.M
    return room_b.center - transform.apply_point(room_m.center)


def surface_merge_residual(plane_b: PlaneCP, plane_m: PlaneCP,
                           transform: FrameTransform) -> np.ndarray:
    """Minimal planar error between a plan surface and a transformed observed one.

    Returns (signed angle about z from the plan normal to the transformed
    normal, signed distance difference), after flipping the transformed
    plane's orientation if it faces away from the plan normal.
    """
    assert plane_b.frame is FrameId.B and plane_m.frame is FrameId.M
    r, _ = _surface_residual_jacobian(
        plane_b, float(plane_m.azimuth), plane_m.dist, transform.yaw,
        transform.translation,
    )
    return r


def _surface_residual_jacobian(plane_b: PlaneCP, phi_m: float, d_m: float,
                               yaw: float, t: np.ndarray):
    """Shared residual/Jacobian core; columns are (tx, ty, yaw, [phi_m, d_m])."""
    phi = phi_m + yaw
    n = np.array([math.cos(phi), math.sin(phi)])
    sign = 1.0
    if float(n @ plane_b.normal[:2]) < 0.0:
        sign = -1.0
    r_ang = wrap_angle(phi + (math.pi if sign < 0 else 0.0) - plane_b.azimuth)
    d_prime = d_m + float(t @ n)
    r_dist = sign * d_prime - plane_b.dist
    n_perp = np.array([-n[1], n[0]])
    jac = np.array([
        [0.0, 0.0, 1.0, 1.0, 0.0],
        [sign * n[0], sign * n[1], sign * float(t @ n_perp),
         sign * float(t @ n_perp), sign],
    ])
    return np.array([r_ang, r_dist]), jac


# -- problem construction --------------------------------------------------------


@dataclass
class _Block:
    """One residual block: evaluation plus bookkeeping for the report."""

    kind: FactorKind
    a_id: str
    s_id: str
    info: np.ndarray
    delta: float  # Huber scale

    def evaluate(self, state: np.ndarray):  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass
class _RoomBlock(_Block):
    c_b: np.ndarray = None
    c_m: np.ndarray = None
    var: slice | None = None  # slice of the observed center in the state, if refined

    def evaluate(self, state):
        t, yaw = state[:2], state[2]
        c_m = state[self.var] if self.var is not None else self.c_m
        rot = _rot(yaw)
        r = self.c_b - (rot @ c_m + t)
        jac = np.zeros((2, len(state)))
        jac[:, 0:2] = -np.eye(2)
        jac[:, 2] = -(_drot(yaw) @ c_m)
        if self.var is not None:
            jac[:, self.var] = -rot
        return r, jac


@dataclass
class _SurfaceBlock(_Block):
    plane_b: PlaneCP = None
    phi_m: float = 0.0
    d_m: float = 0.0
    var: slice | None = None  # slice of (phi, d) in the state, if refined

    def evaluate(self, state):
        t, yaw = state[:2], state[2]
        phi_m, d_m = (state[self.var] if self.var is not None
                      else (self.phi_m, self.d_m))
        r, core = _surface_residual_jacobian(self.plane_b, float(phi_m), float(d_m),
                                             float(yaw), t)
        jac = np.zeros((2, len(state)))
        jac[:, 0:3] = core[:, 0:3]
        if self.var is not None:
            jac[:, self.var] = core[:, 3:5]
        return r, jac


@dataclass
class _RoomToSurfacesBlock(_Block):
    """Ties a refined room center to the center implied by its refined surfaces."""

    room_var: slice = None
    surface_vars: tuple[slice, ...] = ()

    def evaluate(self, state):
        from .factors import room_center_from_surfaces

        def implied(values: np.ndarray) -> np.ndarray:
            planes = []
            for i, var in enumerate(self.surface_vars):
                phi, d = values[2 * i], values[2 * i + 1]
                planes.append(plane_cp(np.array([math.cos(phi), math.sin(phi), 0.0]),
                                       d, FrameId.M))
            return room_center_from_surfaces(planes)

        values = np.concatenate([state[v] for v in self.surface_vars])
        r = state[self.room_var] - implied(values)
        jac = np.zeros((2, len(state)))
        jac[:, self.room_var] = np.eye(2)
        h = 1e-7
        for i in range(len(values)):
            bumped = values.copy()
            bumped[i] += h
            plus = implied(bumped)
            bumped[i] -= 2 * h
            minus = implied(bumped)
            column = -(plus - minus) / (2 * h)
            var = self.surface_vars[i // 2]
            jac[:, var.start + i % 2] += column
        return r, jac


@dataclass
class MergeProblem:
    """Residual blocks over the transform (and optionally observed landmarks)."""

    agraph: LayeredGraph
    sgraph: LayeredGraph
    matches: MatchSet
    options: MergeOptions
    blocks: list[_Block]
    state0: np.ndarray
    n_vars: int
    odometry_blocks: list[tuple[str, str, np.ndarray]] = field(default_factory=list)
    var_layout: dict[str, slice] = field(default_factory=dict)


def initialize_transform(matches: MatchSet, agraph: LayeredGraph,
                         sgraph: LayeredGraph) -> FrameTransform:
    """Closed-form planar rigid fit of matched room centers and surface anchors."""
    from .matching.affinity import GraphConsistency
    from .matching.params import MatchParams

    scorer = GraphConsistency(agraph, sgraph, MatchParams())
    plan_pts, obs_pts = [], []
    for pair in sorted(matches.pairs):
        if pair.level is MatchLevel.ROOM:
            plan_pts.append(agraph.rooms[pair.a_node].center)
            obs_pts.append(sgraph.rooms[pair.s_node].center)
        else:
            plan_pts.append(scorer.surface_anchor(True, pair.a_node)[0])
            obs_pts.append(scorer.surface_anchor(False, pair.s_node)[0])
    plan = np.array(plan_pts)
    obs = np.array(obs_pts)
    distinct = len(np.unique(np.round(obs, 9), axis=0)) if len(obs) else 0
    if distinct < 2:
        logger.warning("initialize_transform: %d distinct matched points, "
                       "falling back to identity", distinct)
        return FrameTransform.identity()
    pc, qc = plan.mean(axis=0), obs.mean(axis=0)
    h = (obs - qc).T @ (plan - pc)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    rot = vt.T @ np.diag([1.0, d]) @ u.T
    yaw = math.atan2(rot[1, 0], rot[0, 0])
    t = pc - _rot(yaw) @ qc
    return FrameTransform(t, yaw)


def build_merge_problem(agraph: LayeredGraph, sgraph: LayeredGraph, matches: MatchSet,
                        options: MergeOptions | None = None,
                        info_config: InformationConfig | None = None) -> MergeProblem:
    options = options or MergeOptions()
    room_pairs = sorted(matches.at_level(MatchLevel.ROOM))
    surface_pairs = sorted(matches.at_level(MatchLevel.WALL_SURFACE))
    if not room_pairs and not surface_pairs:
        raise DegenerateProblem("no cross-graph residual blocks reference the transform")

    n_vars = 3
    var_layout: dict[str, slice] = {"transform": slice(0, 3)}
    state0 = [0.0, 0.0, 0.0]
    if options.refine_landmarks:
        for pair in room_pairs:
            var_layout[f"room:{pair.s_node}"] = slice(n_vars, n_vars + 2)
            state0.extend(sgraph.rooms[pair.s_node].center)
            n_vars += 2
        for pair in surface_pairs:
            plane = sgraph.wall_surfaces[pair.s_node].plane
            var_layout[f"surface:{pair.s_node}"] = slice(n_vars, n_vars + 2)
            state0.extend([plane.azimuth, plane.dist])
            n_vars += 2

    blocks: list[_Block] = []
    for pair in room_pairs:
        blocks.append(_RoomBlock(
            FactorKind.ROOM_MERGE, pair.a_node, pair.s_node,
            information_for(FactorKind.ROOM_MERGE, 2, info_config), options.huber_delta,
            c_b=agraph.rooms[pair.a_node].center,
            c_m=sgraph.rooms[pair.s_node].center,
            var=var_layout.get(f"room:{pair.s_node}"),
        ))
    for pair in surface_pairs:
        plane_m = sgraph.wall_surfaces[pair.s_node].plane
        blocks.append(_SurfaceBlock(
            FactorKind.SURFACE_MERGE, pair.a_node, pair.s_node,
            information_for(FactorKind.SURFACE_MERGE, 2, info_config), options.huber_delta,
            plane_b=agraph.wall_surfaces[pair.a_node].plane,
            phi_m=float(plane_m.azimuth), d_m=plane_m.dist,
            var=var_layout.get(f"surface:{pair.s_node}"),
        ))
    if options.refine_landmarks:
        surface_of = {p.s_node for p in surface_pairs}
        for pair in room_pairs:
            room = sgraph.rooms[pair.s_node]
            if all(sid in surface_of for sid in room.surfaces):
                blocks.append(_RoomToSurfacesBlock(
                    FactorKind.ROOM_TO_SURFACES, pair.a_node, pair.s_node,
                    information_for(FactorKind.ROOM_TO_SURFACES, 2, info_config),
                    options.huber_delta,
                    room_var=var_layout[f"room:{pair.s_node}"],
                    surface_vars=tuple(var_layout[f"surface:{sid}"]
                                       for sid in room.surfaces),
                ))

    odometry_blocks = [(e.frm, e.to, np.asarray(e.delta)) for e in sgraph.odometry]

    init = initialize_transform(matches, agraph, sgraph)
    state0 = np.asarray(state0, dtype=float)
    state0[0:2] = init.translation
    state0[2] = init.yaw

    problem = MergeProblem(agraph, sgraph, matches, options, blocks, state0,
                           n_vars, odometry_blocks, var_layout)
    _check_well_posed(problem)
    return problem


def _check_well_posed(problem: MergeProblem):
    """Numeric observability check at the initial state."""
    rows = []
    for block in problem.blocks:
        _, jac = block.evaluate(problem.state0)
        rows.append(jac)
    stacked = np.vstack(rows)
    if stacked.shape[0] < problem.n_vars:
        raise DegenerateProblem(
            f"{stacked.shape[0]} residual rows cannot constrain {problem.n_vars} variables"
        )
    sv = np.linalg.svd(stacked, compute_uv=False)
    if sv[-1] < 1e-8 * max(sv[0], 1.0):
        raise DegenerateProblem(
            "matched geometry does not constrain the planar transform "
            "(needs both axes or two distinct room centers)"
        )


# -- solving ---------------------------------------------------------------------


def _robust_terms(block: _Block, state: np.ndarray):
    r, jac = block.evaluate(state)
    e2 = float(r @ block.info @ r)
    e = math.sqrt(e2)
    if e <= block.delta:
        return r, jac, 1.0, e2
    return r, jac, block.delta / e, 2.0 * block.delta * e - block.delta ** 2


def _total_cost(problem: MergeProblem, state: np.ndarray) -> float:
    return sum(_robust_terms(b, state)[3] for b in problem.blocks)


@dataclass(frozen=True)
class ISGraph:
    """The merged, frame-aligned graph with the solved transform and diagnostics."""

    graph: LayeredGraph
    transform: FrameTransform
    cost: float
    residual_report: tuple[dict, ...]
    matches: MatchSet
    trace: tuple[tuple[int, float, float], ...]

    def to_dict(self) -> dict:
        from .graph_io import graph_to_dict, transform_to_dict

        return {
            "graph": graph_to_dict(self.graph),
            "transform": transform_to_dict(self.transform),
            "cost": self.cost,
            "residuals": [dict(entry) for entry in self.residual_report],
            "matches": {
                "rooms": [[p.a_node, p.s_node] for p in sorted(self.matches.pairs)
                          if p.level is MatchLevel.ROOM],
                "wall_surfaces": [[p.a_node, p.s_node] for p in sorted(self.matches.pairs)
                                  if p.level is MatchLevel.WALL_SURFACE],
            },
        }


def solve_merge(problem: MergeProblem) -> ISGraph:
    """Levenberg-Marquardt on the robustified merge cost."""
    opts = problem.options
    state = problem.state0.copy()
    cost = _total_cost(problem, state)
    damping = opts.initial_damping
    trace: list[tuple[int, float, float]] = [(0, cost, damping)]

    for iteration in range(1, opts.max_iterations + 1):
        h = np.zeros((problem.n_vars, problem.n_vars))
        g = np.zeros(problem.n_vars)
        for block in problem.blocks:
            r, jac, w, _ = _robust_terms(block, state)
            wj = block.info @ jac
            h += w * jac.T @ wj
            g += w * jac.T @ (block.info @ r)

        accepted = False
        scale = np.maximum(np.diag(h), 1e-12)
        while damping <= opts.max_damping:
            try:
                step = np.linalg.solve(h + damping * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                new_state = state + step
                new_state[2] = wrap_angle(new_state[2])
                new_cost = _total_cost(problem, new_state)
                if new_cost <= cost + 1e-15:
                    accepted = True
                    break
            damping *= opts.damping_factor
        if not accepted:
            raise SolveFailed(
                f"no damping value up to {opts.max_damping:g} decreased the cost "
                f"(iteration {iteration}, cost {cost:.3e})"
            )

        improvement = cost - new_cost
        state, cost = new_state, new_cost
        damping = max(damping / opts.damping_factor, 1e-12)
        trace.append((iteration, cost, damping))
        if cost < opts.cost_floor or improvement <= opts.relative_tolerance * max(cost, opts.cost_floor):
            break

    transform = FrameTransform(state[0:2].copy(), float(state[2]))
    report = _residual_report(problem, state)
    _apply_gates(report, opts)
    merged = _merge_graphs(problem, transform, state)
    return ISGraph(merged, transform, cost, tuple(report), problem.matches, tuple(trace))


def _residual_report(problem: MergeProblem, state: np.ndarray) -> list[dict]:
    report = []
    for block in problem.blocks:
        r, _ = block.evaluate(state)
        report.append({
            "kind": block.kind.value,
            "a_id": block.a_id,
            "s_id": block.s_id,
            "value": [float(v) for v in r],
            "norm": float(np.linalg.norm(r)),
        })
    for frm, to, delta in problem.odometry_blocks:
        kf_a = problem.sgraph.keyframes[frm].pose
        kf_b = problem.sgraph.keyframes[to].pose
        rot_t = _rot(kf_a[2]).T
        actual = np.concatenate([rot_t @ (kf_b[:2] - kf_a[:2]),
                                 [wrap_angle(kf_b[2] - kf_a[2])]])
        value = np.concatenate([delta[:2] - actual[:2],
                                [wrap_angle(delta[2] - actual[2])]])
        report.append({
            "kind": FactorKind.ODOMETRY.value,
            "a_id": frm,
            "s_id": to,
            "value": [float(v) for v in value],
            "norm": float(np.linalg.norm(value)),
        })
    return report


def _apply_gates(report: list[dict], opts: MergeOptions):
    for entry in report:
        if entry["kind"] != FactorKind.SURFACE_MERGE.value:
            continue
        angle, dist = entry["value"]
        if abs(angle) > opts.gate_angle or abs(dist) > opts.gate_dist:
            raise MatchRejected(
                f"surface pair ({entry['a_id']}, {entry['s_id']}) residual "
                f"(angle {angle:.3f} rad, dist {dist:.3f} m) exceeds the "
                f"({opts.gate_angle} rad, {opts.gate_dist} m) gates"
            )


def _merge_graphs(problem: MergeProblem, transform: FrameTransform,
                  state: np.ndarray) -> LayeredGraph:
    """All plan nodes plus every observed node re-expressed in frame B."""
    agraph, sgraph = problem.agraph, problem.sgraph
    refined_rooms = {}
    refined_surfaces = {}
    if problem.options.refine_landmarks:
        for key, var in problem.var_layout.items():
            if key.startswith("room:"):
                refined_rooms[key[5:]] = state[var].copy()
            elif key.startswith("surface:"):
                refined_surfaces[key[8:]] = state[var].copy()

    surfaces = dict(agraph.wall_surfaces)
    for sid, surface in sgraph.wall_surfaces.items():
        if sid in surfaces:
            raise DegenerateProblem(f"node id collision between graphs: {sid}")
        plane_m = surface.plane
        if sid in refined_surfaces:
            phi, d = refined_surfaces[sid]
            plane_m = plane_cp(np.array([math.cos(phi), math.sin(phi), 0.0]), d, FrameId.M)
        surfaces[sid] = WallSurface.from_plane(
            sid, transform_plane(transform, plane_m), surface.owner_room, None
        )
    rooms = dict(agraph.rooms)
    for rid, room in sgraph.rooms.items():
        center = refined_rooms.get(rid, room.center)
        rooms[rid] = Room(rid, transform.apply_point(center), room.kind,
                          room.surfaces, FrameId.B)
    keyframes = {}
    for kid, kf in sgraph.keyframes.items():
        keyframes[kid] = Keyframe(kid, transform.apply_pose(kf.pose), FrameId.B,
                                  kf.timestamp)

    # single-floor artifact: keep the plan floor, extend it with observed rooms
    plan_floor = next(iter(agraph.floors.values()))
    all_rooms = tuple(plan_floor.rooms) + tuple(sgraph.rooms)
    floors = {plan_floor.id: Floor(plan_floor.id, plan_floor.center, all_rooms)}

    return LayeredGraph(FrameId.B, surfaces, dict(agraph.walls), rooms,
                        dict(agraph.doorways), keyframes, floors, sgraph.odometry)
