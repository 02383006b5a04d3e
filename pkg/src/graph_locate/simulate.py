"""Simulate the robot's partial, noisy, frame-shifted view of a plan graph.

The simulator emits an already-estimated situational graph: landmark
estimates plus a keyframe chain, with Gaussian noise injected at landmark
level. Landmark draws and odometry draws come from independent child
streams of the seed, so revealing a longer room prefix reuses identical
noise for the shared prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .entities import Floor, Keyframe, Room, RoomKind, WallSurface
from .errors import FrameError, UnknownRoom
from .factors import room_center_from_surfaces
from .frames import FrameId, FrameTransform, wrap_angle
from .graph import LayeredGraph, OdometryEdge
from .graph_io import (_array, _integer, _number, _require, _string, _vector,
                       graph_from_dict, load_json, transform_from_dict,
                       transform_to_dict)
from .planes import plane_cp, rotate_normal_z, transform_plane


@dataclass(frozen=True)
class SimConfig:
    """Ground-truth transform plus observation schedule and noise levels."""

    true_transform: FrameTransform
    visited_rooms: tuple[str, ...]
    noise_plane_dist: float = 0.0
    noise_plane_angle: float = 0.0
    noise_room_center: float = 0.0
    odom_step: float = 0.5
    odom_noise: tuple[float, float] = (0.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "visited_rooms", tuple(self.visited_rooms))
        object.__setattr__(self, "odom_noise",
                           (float(self.odom_noise[0]), float(self.odom_noise[1])))
        for name in ("noise_plane_dist", "noise_plane_angle", "noise_room_center",
                     "odom_step"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.odom_noise[0] < 0 or self.odom_noise[1] < 0:
            raise ValueError("odom_noise sigmas must be non-negative")
        if not self.visited_rooms:
            raise ValueError("visited_rooms must be non-empty")

    def with_prefix(self, k: int) -> "SimConfig":
        return replace(self, visited_rooms=self.visited_rooms[:k])


@dataclass(frozen=True)
class GroundTruth:
    """What the simulator knows and the pipeline must recover."""

    transform: FrameTransform
    room_pairs: tuple[tuple[str, str], ...]       # (plan id, observed id)
    surface_pairs: tuple[tuple[str, str], ...]
    trajectory: np.ndarray                        # noise-free poses in frame M, (n, 3)
    seed: int

    def pair_set(self) -> set[tuple[str, str]]:
        return set(self.room_pairs) | set(self.surface_pairs)


def simulate_sgraph(agraph: LayeredGraph, cfg: SimConfig) -> tuple[LayeredGraph, GroundTruth]:
    """Observe ``cfg.visited_rooms`` of the plan graph in frame M with noise."""
    for rid in cfg.visited_rooms:
        if rid not in agraph.rooms:
            raise UnknownRoom(f"visited room {rid!r} not in the plan graph")
    if len(set(cfg.visited_rooms)) != len(cfg.visited_rooms):
        raise UnknownRoom("visited_rooms contains duplicates")

    rng_landmarks, rng_odom = np.random.default_rng(cfg.seed).spawn(2)
    to_map = cfg.true_transform.inverse()

    surfaces: dict[str, WallSurface] = {}
    rooms: dict[str, Room] = {}
    room_pairs: list[tuple[str, str]] = []
    surface_pairs: list[tuple[str, str]] = []

    for index, rid in enumerate(cfg.visited_rooms):
        room = agraph.rooms[rid]
        s_rid = f"s_room_{index}"
        planes = []
        for k, sid in enumerate(room.surfaces):
            plane = transform_plane(to_map, agraph.wall_surfaces[sid].plane)
            d_noise = rng_landmarks.normal(0.0, cfg.noise_plane_dist) \
                if cfg.noise_plane_dist > 0 else 0.0
            a_noise = rng_landmarks.normal(0.0, cfg.noise_plane_angle) \
                if cfg.noise_plane_angle > 0 else 0.0
            noisy = plane_cp(rotate_normal_z(plane.normal, a_noise),
                             plane.dist + d_noise, FrameId.M)
            s_sid = f"s_ws_{index}_{k}"
            surfaces[s_sid] = WallSurface.from_plane(s_sid, noisy, owner_room=s_rid)
            surface_pairs.append((sid, s_sid))
            planes.append(noisy)
        center = room_center_from_surfaces(planes)
        if cfg.noise_room_center > 0:
            center = center + rng_landmarks.normal(0.0, cfg.noise_room_center, size=2)
        rooms[s_rid] = Room(s_rid, center, RoomKind.FOUR_WALL,
                            tuple(f"s_ws_{index}_{k}" for k in range(len(room.surfaces))),
                            FrameId.M)
        room_pairs.append((rid, s_rid))

    trajectory = _lay_trajectory(
        [to_map.apply_point(agraph.rooms[rid].center) for rid in cfg.visited_rooms],
        cfg.odom_step,
    )
    keyframes, odometry = _noisy_keyframes(trajectory, cfg.odom_noise, rng_odom)

    centers = np.array([r.center for r in rooms.values()])
    floor = Floor("s_floor_0", centers.mean(axis=0), tuple(rooms))

    sgraph = LayeredGraph(FrameId.M, surfaces, {}, rooms, {}, keyframes,
                          {"s_floor_0": floor}, tuple(odometry))
    sgraph.validate_profile("sgraph")
    truth = GroundTruth(cfg.true_transform, tuple(room_pairs), tuple(surface_pairs),
                        trajectory, cfg.seed)
    return sgraph, truth


def _lay_trajectory(waypoints: list[np.ndarray], step: float) -> np.ndarray:
    """Poses along the room-center polyline, stepped per segment, yaw = heading."""
    poses = [np.array([waypoints[0][0], waypoints[0][1], 0.0])]
    for a, b in zip(waypoints, waypoints[1:]):
        delta = np.asarray(b) - np.asarray(a)
        length = float(np.linalg.norm(delta))
        if length < 1e-12:
            continue
        heading = math.atan2(delta[1], delta[0])
        n_steps = max(1, int(math.ceil(length / step))) if step > 0 else 1
        for i in range(1, n_steps + 1):
            frac = min(1.0, i * step / length) if step > 0 else 1.0
            xy = np.asarray(a) + frac * delta
            poses.append(np.array([xy[0], xy[1], heading]))
    return np.array(poses)


def _noisy_keyframes(trajectory: np.ndarray, odom_noise: tuple[float, float],
                     rng: np.random.Generator):
    """Integrate noisy relative motions; the first pose anchors the map frame."""
    sigma_t, sigma_y = odom_noise
    keyframes: dict[str, Keyframe] = {}
    odometry: list[OdometryEdge] = []
    est = trajectory[0].copy()
    keyframes["kf_0"] = Keyframe("kf_0", est, FrameId.M, 0)
    for i in range(1, len(trajectory)):
        prev, cur = trajectory[i - 1], trajectory[i]
        # true relative motion in the previous pose's frame
        c, s = math.cos(prev[2]), math.sin(prev[2])
        rot_t = np.array([[c, s], [-s, c]])
        delta_xy = rot_t @ (cur[:2] - prev[:2])
        delta_yaw = wrap_angle(cur[2] - prev[2])
        noisy = np.array([
            delta_xy[0] + (rng.normal(0.0, sigma_t) if sigma_t > 0 else 0.0),
            delta_xy[1] + (rng.normal(0.0, sigma_t) if sigma_t > 0 else 0.0),
            delta_yaw + (rng.normal(0.0, sigma_y) if sigma_y > 0 else 0.0),
        ])
        odometry.append(OdometryEdge(f"kf_{i - 1}", f"kf_{i}", noisy))
        c, s = math.cos(est[2]), math.sin(est[2])
        est = np.array([
            est[0] + c * noisy[0] - s * noisy[1],
            est[1] + s * noisy[0] + c * noisy[1],
            wrap_angle(est[2] + noisy[2]),
        ])
        keyframes[f"kf_{i}"] = Keyframe(f"kf_{i}", est, FrameId.M, i)
    return keyframes, odometry


# -- ingestion and serialization ----------------------------------------------


def ingest_sgraph(path_or_data) -> LayeredGraph:
    """Load a situational graph from file, enforcing the S-Graph layer profile."""
    data = load_json(path_or_data) if not isinstance(path_or_data, dict) else path_or_data
    graph = graph_from_dict(data)
    if graph.frame is not FrameId.M:
        raise FrameError(f"an S-Graph must be in frame M, file says {graph.frame.value}")
    graph.validate_profile("sgraph")
    return graph


def sim_config_to_dict(cfg: SimConfig) -> dict:
    return {
        "true_transform": transform_to_dict(cfg.true_transform),
        "visited_rooms": list(cfg.visited_rooms),
        "noise_plane_dist": cfg.noise_plane_dist,
        "noise_plane_angle": cfg.noise_plane_angle,
        "noise_room_center": cfg.noise_room_center,
        "odom_step": cfg.odom_step,
        "odom_noise": list(cfg.odom_noise),
        "seed": cfg.seed,
    }


def sim_config_from_dict(data, path: str = "$") -> SimConfig:
    odom = _vector(data.get("odom_noise", [0.0, 0.0]), 2, f"{path}.odom_noise")
    visited = tuple(
        _string(r, f"{path}.visited_rooms[{i}]")
        for i, r in enumerate(_array(_require(data, "visited_rooms", path),
                                     f"{path}.visited_rooms"))
    )
    return SimConfig(
        true_transform=transform_from_dict(_require(data, "true_transform", path),
                                           f"{path}.true_transform"),
        visited_rooms=visited,
        noise_plane_dist=_number(data.get("noise_plane_dist", 0.0), f"{path}.noise_plane_dist"),
        noise_plane_angle=_number(data.get("noise_plane_angle", 0.0), f"{path}.noise_plane_angle"),
        noise_room_center=_number(data.get("noise_room_center", 0.0), f"{path}.noise_room_center"),
        odom_step=_number(data.get("odom_step", 0.5), f"{path}.odom_step"),
        odom_noise=(float(odom[0]), float(odom[1])),
        seed=_integer(data.get("seed", 0), f"{path}.seed"),
    )


def ground_truth_to_dict(gt: GroundTruth) -> dict:
    return {
        "transform": transform_to_dict(gt.transform),
        "room_pairs": [list(p) for p in gt.room_pairs],
        "surface_pairs": [list(p) for p in gt.surface_pairs],
        "trajectory": [list(pose) for pose in gt.trajectory],
        "seed": gt.seed,
    }


def ground_truth_from_dict(data, path: str = "$") -> GroundTruth:
    return GroundTruth(
        transform=transform_from_dict(_require(data, "transform", path), f"{path}.transform"),
        room_pairs=tuple(
            (p[0], p[1]) for p in _array(_require(data, "room_pairs", path),
                                         f"{path}.room_pairs")
        ),
        surface_pairs=tuple(
            (p[0], p[1]) for p in _array(_require(data, "surface_pairs", path),
                                         f"{path}.surface_pairs")
        ),
        trajectory=np.array([
            list(_vector(p, 3, f"{path}.trajectory[{i}]"))
            for i, p in enumerate(_array(_require(data, "trajectory", path),
                                         f"{path}.trajectory"))
        ]),
        seed=_integer(data.get("seed", 0), f"{path}.seed"),
    )
