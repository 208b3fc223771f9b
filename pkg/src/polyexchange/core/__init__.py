"""Exact arithmetic and planar geometry kernel."""
from .euler import SubdivisionCount, Topology, euler_faces
from .geometry import (
    ConvexPolygon,
    HalfPlane,
    Segment,
    clip_polygon,
    convex_hull,
    intersect_polygons,
    merge_collinear,
    orient,
    point,
    point_on_segment,
    rectangle,
    segment_intersection,
)
from .interval import BallScalar, IntervalDivisionError, enclose
from .scalar import Q, as_rational, format_rational, parse_rational

__all__ = [
    "BallScalar",
    "ConvexPolygon",
    "HalfPlane",
    "IntervalDivisionError",
    "Q",
    "Segment",
    "SubdivisionCount",
    "Topology",
    "as_rational",
    "clip_polygon",
    "convex_hull",
    "enclose",
    "euler_faces",
    "format_rational",
    "intersect_polygons",
    "merge_collinear",
    "orient",
    "parse_rational",
    "point",
    "point_on_segment",
    "rectangle",
    "segment_intersection",
]
