"""Exception hierarchy.

``InputError`` subclasses map to CLI exit code 2, ``AnalysisError``
subclasses to exit code 1.
"""
from typing import Optional


class JointFlexError(Exception):
    """Base class for all library errors."""


class InputError(JointFlexError):
    """The caller supplied an invalid scene, objective or spec."""


class SceneFormatError(InputError):
    """Malformed scene or trace document."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InvalidPolygonError(InputError):
    def __init__(self, message: str, body: Optional[str] = None):
        self.body = body
        super().__init__(f"body {body!r}: {message}" if body else message)


class InitialPenetrationError(InputError):
    """A vertex starts inside another body deeper than the tolerance."""

    def __init__(
        self,
        edge_body: int,
        edge_index: int,
        vertex_body: int,
        vertex_index: int,
        depth: float,
        names: Optional[tuple[str, str]] = None,
    ):
        self.edge_body = edge_body
        self.edge_index = edge_index
        self.vertex_body = vertex_body
        self.vertex_index = vertex_index
        self.depth = depth
        edge_name, vertex_name = names or (str(edge_body), str(vertex_body))
        super().__init__(
            f"vertex {vertex_index} of body {vertex_name!r} penetrates body "
            f"{edge_name!r} (edge {edge_index}) by {depth:.3g}"
        )


class InvalidObjectiveError(InputError):
    pass


class InfeasibleFlockSpecError(InputError):
    pass


class GeometryError(JointFlexError):
    pass


class VertexIndexError(GeometryError, IndexError):
    pass


class InsetCollapseError(GeometryError):
    pass


class DegenerateCornerError(GeometryError):
    """Averaged normal of a corner vanishes (antiparallel edge normals)."""


class AnalysisError(JointFlexError):
    pass


class LPError(AnalysisError):
    """The LP backend failed for a reason other than infeasible/unbounded."""


class InfeasibleLPError(AnalysisError):
    pass


class UnboundedLPError(AnalysisError):
    pass


class StallError(AnalysisError):
    pass


class EmptyVisibilityError(AnalysisError):
    pass
