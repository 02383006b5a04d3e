"""Exception types shared across the package."""


class GraphLocateError(Exception):
    """Base class for all errors raised by graph_locate.

    A ``stage`` attribute may be attached by the pipeline so callers can
    tell which processing step failed.
    """

    stage: str | None = None


class InvalidPlane(GraphLocateError):
    """Plane construction from degenerate input (e.g. zero-length normal)."""


class AxisMismatch(GraphLocateError):
    """Operation requires wall surfaces of a specific axis arrangement."""


class FrameError(GraphLocateError):
    """Geometric quantities from incompatible frames were combined."""


class LayerError(GraphLocateError):
    """Graph contains node layers its profile forbids."""


class InvalidFloorplan(GraphLocateError):
    """Floorplan specification is structurally invalid."""


class InvalidDoorway(GraphLocateError):
    """Doorway references missing, identical or non-adjacent rooms."""


class UnknownRoom(GraphLocateError):
    """A referenced room id does not exist in the graph."""


class ParseError(GraphLocateError):
    """Input file violates the expected JSON schema.

    Carries the JSON path of the offending element.
    """

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class DegenerateProblem(GraphLocateError):
    """Merge problem does not constrain all transform degrees of freedom."""


class SolveFailed(GraphLocateError):
    """Nonlinear solver diverged or exhausted its damping schedule."""


class MatchRejected(GraphLocateError):
    """Post-merge residuals exceeded the acceptance gates."""


class EvalError(GraphLocateError):
    """Evaluation inputs are inconsistent (e.g. trajectory length mismatch)."""
