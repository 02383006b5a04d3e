"""Global localization by matching plan-derived graphs against robot-built ones.

Build a plan graph from a floorplan, observe it partially and noisily from
an unknown frame, match the two graphs hierarchically, and merge them by
nonlinear least squares to recover the transform between the frames.
"""

from .entities import (Axis, Doorway, Floor, Keyframe, Room, RoomKind, Wall,
                       WallSurface)
from .errors import (AxisMismatch, DegenerateProblem, EvalError, FrameError,
                     GraphLocateError, InvalidDoorway, InvalidFloorplan,
                     InvalidPlane, LayerError, MatchRejected, ParseError,
                     SolveFailed, UnknownRoom)
from .evaluate import ApeStats, ape, landmark_rmse, pair_precision_recall, transform_error
from .factors import (FactorKind, FactorResidual, doorway_factor, room_center,
                      room_center_from_surfaces, wall_center, wall_factor)
from .floorplan import DoorwaySpec, FloorplanSpec, RoomSpec, build_agraph
from .frames import FrameId, FrameTransform, transform_point, wrap_angle
from .graph import LayeredGraph, OdometryEdge
from .matching import (MatchOutcome, MatchPair, MatchParams, MatchSet, MatchStatus,
                       match, solve_densest)
from .merge import (ISGraph, MergeOptions, build_merge_problem, initialize_transform,
                    room_merge_residual, solve_merge, surface_merge_residual)
from .pipeline import PipelineResult, run_pipeline
from .planes import PlaneCP, plane_cp, plane_from_azel, transform_plane
from .render import render_svg
from .simulate import GroundTruth, SimConfig, ingest_sgraph, simulate_sgraph

__version__ = "0.1.0"
