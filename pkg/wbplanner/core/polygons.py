"""Polygon utilities: primitive shapes, resampling and convex faces."""

from __future__ import annotations

import math

import numpy as np

from ..models.outline import (
    InvalidPolygonError,
    NonConvexPolygonError,
    find_reflex_vertex,
    signed_area,
    validate_polygon_vertices,
)
from ..models.types import Point2D, Vector2D
from .tolerances import FACE_MERGE_ANGLE, RESAMPLE_CORNER_ANGLE


class ResamplingError(ValueError):
    """Raised when a polygon cannot be resampled at the requested spacing."""

    pass


def polygon_perimeter(vertices: np.ndarray) -> float:
    """Length of the closed polyline through vertices."""
    vertices = np.asarray(vertices, dtype=float)
    return float(np.sum(np.linalg.norm(np.roll(vertices, -1, axis=0) - vertices, axis=1)))


def turning_angles(vertices: np.ndarray) -> np.ndarray:
    """Absolute heading change at each vertex (radians)."""
    incoming = vertices - np.roll(vertices, 1, axis=0)
    outgoing = np.roll(vertices, -1, axis=0) - vertices
    cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    dot = np.sum(incoming * outgoing, axis=1)
    return np.abs(np.arctan2(cross, dot))


def _sample_chain(chain: np.ndarray, spacing: float) -> np.ndarray:
    """Evenly spaced points along an open polyline, excluding its last point."""
    lengths = np.linalg.norm(np.diff(chain, axis=0), axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cumulative[-1]
    count = max(1, int(round(total / spacing)))
    stations = np.arange(count) * (total / count)
    return np.column_stack([
        np.interp(stations, cumulative, chain[:, 0]),
        np.interp(stations, cumulative, chain[:, 1]),
    ])


def resample_polygon(vertices: np.ndarray | list[Point2D], target_spacing: float) -> np.ndarray:
    """
    Resample a polygon boundary to near-uniform arc-length spacing.

    Corners (turning angle above RESAMPLE_CORNER_ANGLE) are kept; each
    corner-to-corner chain is split into equal arc-length pieces. A polygon
    without corners is treated as one chain starting at its first vertex.

    Args:
        vertices: Counter-clockwise simple polygon (N, 2)
        target_spacing: Desired spacing between consecutive vertices (meters)

    Returns:
        Resampled (M, 2) vertex array, simple and counter-clockwise

    Raises:
        InvalidPolygonError: If the input polygon is invalid
        ResamplingError: If the spacing is not positive or exceeds perimeter/3
    """
    array = np.asarray(vertices, dtype=float)
    validate_polygon_vertices(array)
    perimeter = polygon_perimeter(array)
    if not target_spacing > 0:
        raise ResamplingError(f"spacing must be positive, got {target_spacing}")
    if target_spacing > perimeter / 3.0:
        raise ResamplingError(
            f"spacing {target_spacing:.6g} exceeds a third of the perimeter ({perimeter / 3.0:.6g})"
        )

    corners = np.nonzero(turning_angles(array) >= RESAMPLE_CORNER_ANGLE)[0]
    anchors = corners.tolist() if corners.size else [0]
    count = array.shape[0]
    pieces = []
    for k, start in enumerate(anchors):
        stop = anchors[(k + 1) % len(anchors)]
        span = (stop - start) % count or count
        chain = array[[(start + j) % count for j in range(span + 1)]]
        pieces.append(_sample_chain(chain, target_spacing))
    result = np.vstack(pieces)
    validate_polygon_vertices(result)
    return result


def box_vertices(width: float, height: float, spacing: float) -> np.ndarray:
    """Axis-aligned rectangle centered at the origin, resampled at spacing."""
    if not width > 0 or not height > 0:
        raise InvalidPolygonError(f"box dimensions must be positive, got {width} x {height}")
    half_w, half_h = 0.5 * width, 0.5 * height
    corners = np.array([[-half_w, -half_h], [half_w, -half_h], [half_w, half_h], [-half_w, half_h]])
    return resample_polygon(corners, spacing)


def circle_vertices(radius: float, spacing: float) -> np.ndarray:
    """Regular polygon inscribed in a circle centered at the origin."""
    if not radius > 0:
        raise InvalidPolygonError(f"radius must be positive, got {radius}")
    count = max(8, int(round(2.0 * math.pi * radius / spacing)))
    angles = 2.0 * math.pi * np.arange(count) / count
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def capsule_vertices(start_x: float, end_x: float, radius: float, spacing: float) -> np.ndarray:
    """
    Stadium outline around the segment [start_x, end_x] on the x-axis.

    Points are spaced uniformly in arc length, counter-clockwise, starting
    at (start_x, -radius).
    """
    if not radius > 0 or not end_x > start_x:
        raise InvalidPolygonError("capsule needs radius > 0 and end_x > start_x")
    straight = end_x - start_x
    arc = math.pi * radius
    perimeter = 2.0 * straight + 2.0 * arc
    count = max(8, int(round(perimeter / spacing)))
    points = []
    for s in np.arange(count) * (perimeter / count):
        if s < straight:
            points.append((start_x + s, -radius))
        elif s < straight + arc:
            angle = -0.5 * math.pi + (s - straight) / radius
            points.append((end_x + radius * math.cos(angle), radius * math.sin(angle)))
        elif s < 2.0 * straight + arc:
            points.append((end_x - (s - straight - arc), radius))
        else:
            angle = 0.5 * math.pi + (s - 2.0 * straight - arc) / radius
            points.append((start_x + radius * math.cos(angle), radius * math.sin(angle)))
    return np.asarray(points, dtype=float)


def convex_faces(vertices: np.ndarray) -> tuple[tuple[Point2D, Vector2D], ...]:
    """
    Half-spaces of a convex counter-clockwise polygon.

    Consecutive edges whose normals agree within FACE_MERGE_ANGLE are
    merged into a single face.

    Raises:
        NonConvexPolygonError: If a reflex vertex is found
    """
    vertices = np.asarray(vertices, dtype=float)
    if signed_area(vertices) <= 0:
        raise InvalidPolygonError("faces require a counter-clockwise polygon")
    reflex = find_reflex_vertex(vertices)
    if reflex is not None:
        raise NonConvexPolygonError(reflex, (float(vertices[reflex, 0]), float(vertices[reflex, 1])))
    faces: list[tuple[Point2D, Vector2D]] = []
    previous_angle: float | None = None
    for start, stop in zip(vertices, np.roll(vertices, -1, axis=0), strict=True):
        edge = stop - start
        length = float(np.hypot(*edge))
        if length == 0.0:
            continue
        normal = (float(edge[1] / length), float(-edge[0] / length))
        angle = math.atan2(normal[1], normal[0])
        if previous_angle is not None and abs(math.remainder(angle - previous_angle, 2.0 * math.pi)) < FACE_MERGE_ANGLE:
            continue
        faces.append(((float(start[0]), float(start[1])), normal))
        previous_angle = angle
    if len(faces) > 1:
        first_angle = math.atan2(faces[0][1][1], faces[0][1][0])
        if abs(math.remainder(first_angle - previous_angle, 2.0 * math.pi)) < FACE_MERGE_ANGLE:
            faces.pop()
    return tuple(faces)
