"""Polygon geometry, poses, kinematics and exact overlap checks."""
from jointflex.geometry.kinematics import edge_normal, signed_distance, world_vertex
from jointflex.geometry.overlap import min_clearance, overlap_depth, penetrating_pairs
from jointflex.geometry.polygon import CornerKind, Polygon, classify_corner, inset_polygon
from jointflex.geometry.proximity import ProximityCandidate, find_candidates
from jointflex.geometry.scene import Body, BoxLimits, Pose, Scene
from jointflex.geometry.visibility import VertexPair, mutually_visible_pairs

__all__ = [
    "Body",
    "BoxLimits",
    "CornerKind",
    "Polygon",
    "Pose",
    "ProximityCandidate",
    "Scene",
    "VertexPair",
    "classify_corner",
    "edge_normal",
    "find_candidates",
    "inset_polygon",
    "min_clearance",
    "mutually_visible_pairs",
    "overlap_depth",
    "penetrating_pairs",
    "signed_distance",
    "world_vertex",
]
