"""Outline polygon and parametric outline models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LinearRing

from .types import Point2D


class InvalidPolygonError(ValueError):
    """Raised when an outline polygon violates its invariants."""

    pass


class NonConvexPolygonError(InvalidPolygonError):
    """Raised when a polygon required to be convex has a reflex vertex."""

    def __init__(self, vertex_index: int, vertex: Point2D) -> None:
        self.vertex_index = vertex_index
        self.vertex = vertex
        super().__init__(
            f"polygon is not convex at vertex {vertex_index} ({vertex[0]:.6g}, {vertex[1]:.6g})"
        )


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace signed area; positive for counter-clockwise order."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def find_reflex_vertex(vertices: np.ndarray, tolerance: float = 1e-12) -> int | None:
    """Return the index of the first vertex where a CCW polygon turns clockwise.

    Collinear vertices (cross product within tolerance) are accepted.
    """
    prev_edges = vertices - np.roll(vertices, 1, axis=0)
    next_edges = np.roll(vertices, -1, axis=0) - vertices
    cross = prev_edges[:, 0] * next_edges[:, 1] - prev_edges[:, 1] * next_edges[:, 0]
    scale = np.linalg.norm(prev_edges, axis=1) * np.linalg.norm(next_edges, axis=1)
    reflex = np.nonzero(cross < -tolerance * np.maximum(scale, 1e-300))[0]
    return int(reflex[0]) if reflex.size else None


def validate_polygon_vertices(vertices: np.ndarray) -> None:
    """Validate vertex count, simplicity and counter-clockwise orientation.

    Raises:
        InvalidPolygonError: If any invariant is violated
    """
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise InvalidPolygonError(f"vertices must be an (N, 2) array, got shape {vertices.shape}")
    if vertices.shape[0] < 3:
        raise InvalidPolygonError(f"polygon needs at least 3 vertices, got {vertices.shape[0]}")
    if not np.all(np.isfinite(vertices)):
        raise InvalidPolygonError("polygon vertices must be finite")
    if not LinearRing(vertices).is_simple:
        raise InvalidPolygonError("polygon is self-intersecting")
    area = signed_area(vertices)
    if area <= 0.0:
        raise InvalidPolygonError(f"polygon must be counter-clockwise (signed area {area:.3g})")


@dataclass(frozen=True, eq=False)
class OutlinePolygon:
    """
    Closed body outline in its own frame.

    Attributes:
        vertices: Ordered counter-clockwise vertices (meters, body frame)
        centroid: Arithmetic mean of the vertices (not the area centroid)
    """

    vertices: tuple[Point2D, ...]
    centroid: Point2D = field(init=False)

    def __post_init__(self) -> None:
        array = np.asarray(self.vertices, dtype=float)
        validate_polygon_vertices(array)
        object.__setattr__(self, 'vertices', tuple((float(x), float(y)) for x, y in array))
        object.__setattr__(self, 'centroid', (float(array[:, 0].mean()), float(array[:, 1].mean())))

    @property
    def n_points(self) -> int:
        return len(self.vertices)

    def as_array(self) -> np.ndarray:
        """Vertices as a fresh (N, 2) float array."""
        return np.asarray(self.vertices, dtype=float)

    def mean_radius(self) -> float:
        """Mean vertex distance from the centroid."""
        return float(np.mean(np.linalg.norm(self.as_array() - np.asarray(self.centroid), axis=1)))

    def __repr__(self) -> str:
        return f"OutlinePolygon(n_points={self.n_points}, centroid=({self.centroid[0]:.4f}, {self.centroid[1]:.4f}))"


@dataclass(frozen=True, eq=False)
class ParametricOutline:
    """
    Smoothed closed curve p(φ) fitted through an outline polygon.

    Vertex n carries the parameter φ_n = n/N_p. Instances compare by
    identity, which lets the symbolic function caches key on them.

    Attributes:
        polygon: The fitted polygon
        sigma: Gaussian width of the coefficient functions (dimensionless)
        normalized: Divide coefficients by their sum (exact partition of unity)
    """

    polygon: OutlinePolygon
    sigma: float
    normalized: bool = True
    nodes: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        vertices = self.polygon.as_array()
        nodes = np.arange(vertices.shape[0], dtype=float) / vertices.shape[0]
        offsets = vertices - np.asarray(self.polygon.centroid)
        nodes.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'offsets', offsets)

    @property
    def n_points(self) -> int:
        return self.polygon.n_points

    @property
    def centroid(self) -> np.ndarray:
        return np.asarray(self.polygon.centroid, dtype=float)
