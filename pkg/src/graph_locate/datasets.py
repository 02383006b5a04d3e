"""Synthetic floorplan generators and fixture plans for experiments.

Random plans are asymmetric by construction: room dimensions are drawn
from a coarse grid without replacement (spacing well above the landmark
noise), so no two rooms look alike and no global symmetry survives.
"""

from __future__ import annotations

import math

import numpy as np

from .floorplan import DoorwaySpec, FloorplanSpec, RoomSpec
from .frames import FrameTransform

_WALL = 0.2
_SIZE_GRID = [3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0]


def random_transform(rng: np.random.Generator, radius: float = 10.0) -> FrameTransform:
    return FrameTransform(rng.uniform(-radius, radius, size=2),
                          float(rng.uniform(-math.pi, math.pi)))


def random_plan(rng: np.random.Generator, n_rooms: int,
                wall_thickness: float = _WALL) -> FloorplanSpec:
    """A strip of rooms with distinct sizes, doorways between neighbors.

    Rooms line up along x sharing walls; every width and height is unique
    within the plan, which rules out both room-level and whole-plan
    symmetries.
    """
    if not 1 <= n_rooms <= len(_SIZE_GRID):
        raise ValueError(f"n_rooms must be in [1, {len(_SIZE_GRID)}]")
    widths = rng.choice(_SIZE_GRID, size=n_rooms, replace=False)
    heights = rng.choice(_SIZE_GRID, size=n_rooms, replace=False)
    rooms = []
    x = 0.0
    for i in range(n_rooms):
        rooms.append(RoomSpec(f"room_{i}", (x, x + float(widths[i])),
                              (0.0, float(heights[i]))))
        x += float(widths[i]) + wall_thickness
    doorways = []
    for i in range(n_rooms - 1):
        a, b = rooms[i], rooms[i + 1]
        y = 0.5 * min(a.y[1], b.y[1])
        doorways.append(DoorwaySpec(
            f"door_{i}", np.array([a.x[1] + wall_thickness / 2.0, y, 0.0]),
            (a.id, b.id),
        ))
    return FloorplanSpec(tuple(rooms), wall_thickness, tuple(doorways))


def symmetric_plan(wall_thickness: float = _WALL) -> FloorplanSpec:
    """Two identical rooms plus one distinguishing room, for symmetry tests."""
    rooms = (
        RoomSpec("twin_a", (0.0, 4.0), (0.0, 3.0)),
        RoomSpec("twin_b", (4.0 + wall_thickness, 8.0 + wall_thickness), (0.0, 3.0)),
        RoomSpec("odd", (8.0 + 2 * wall_thickness, 12.0 + 2 * wall_thickness), (0.0, 5.0)),
    )
    doorways = (
        DoorwaySpec("door_0", np.array([4.0 + wall_thickness / 2.0, 1.5, 0.0]),
                    ("twin_a", "twin_b")),
        DoorwaySpec("door_1", np.array([8.0 + 1.5 * wall_thickness, 1.5, 0.0]),
                    ("twin_b", "odd")),
    )
    return FloorplanSpec(rooms, wall_thickness, doorways)


def l_shaped_plan(wall_thickness: float = _WALL) -> FloorplanSpec:
    """Three rooms in an L arrangement with distinct sizes."""
    rooms = (
        RoomSpec("corner", (0.0, 4.0), (0.0, 4.0)),
        RoomSpec("east", (4.0 + wall_thickness, 9.0 + wall_thickness), (0.0, 3.5)),
        RoomSpec("north", (0.0, 3.5), (4.0 + wall_thickness, 10.0 + wall_thickness)),
    )
    doorways = (
        DoorwaySpec("door_0", np.array([4.0 + wall_thickness / 2.0, 1.75, 0.0]),
                    ("corner", "east")),
        DoorwaySpec("door_1", np.array([1.75, 4.0 + wall_thickness / 2.0, 0.0]),
                    ("corner", "north")),
    )
    return FloorplanSpec(rooms, wall_thickness, doorways)


def suite_plans(seed: int) -> list[tuple[str, FloorplanSpec, FrameTransform]]:
    """The six-plan benchmark suite: 4 to 8 rooms plus the two fixed layouts."""
    rng = np.random.default_rng(seed)
    suite = []
    for index, n_rooms in enumerate((4, 5, 6, 7, 8)):
        plan = random_plan(rng, n_rooms)
        suite.append((f"D{index + 1}", plan, random_transform(rng)))
    suite.append(("D6", l_shaped_plan(), random_transform(rng)))
    return suite
