"""
Tests for the parametric outline.

Run with: pytest tests/ -v
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from shapely.geometry import Point, Polygon

from helpers import outline_point_by_summation
from core.outline import (
    arc_distance,
    coefficients,
    curve_length,
    eval_frame,
    eval_point,
    fit_outline,
    nearest_parameter,
    outline_function,
    sample_derivatives,
    sample_points,
)
from core.polygons import box_vertices, circle_vertices
from models.outline import InvalidPolygonError

SQUARE = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]


@pytest.fixture
def circle_outline():
    """64-gon of radius 0.075 m."""
    angles = 2.0 * math.pi * np.arange(64) / 64
    return fit_outline(0.075 * np.column_stack([np.cos(angles), np.sin(angles)]))


@pytest.fixture
def box_outline():
    return fit_outline(box_vertices(0.276, 0.198, 0.01))


class TestFitOutline:
    """Test fit_outline() input handling."""

    def test_default_sigma_is_inverse_vertex_count(self, circle_outline) -> None:
        assert circle_outline.sigma == pytest.approx(1.0 / 64)
        assert circle_outline.nodes[16] == pytest.approx(0.25)

    def test_centroid_is_vertex_mean(self) -> None:
        outline = fit_outline(SQUARE)
        assert np.allclose(outline.centroid, [0.0, 0.0])

    def test_zero_sigma_rejected(self) -> None:
        with pytest.raises(ValueError, match="sigma"):
            fit_outline(SQUARE, sigma_override=0.0)

    def test_two_vertices_rejected(self) -> None:
        with pytest.raises(InvalidPolygonError, match="at least 3"):
            fit_outline([(0.0, 0.0), (1.0, 0.0)])

    def test_self_intersecting_rejected(self) -> None:
        bowtie = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
        with pytest.raises(InvalidPolygonError, match="self-intersecting"):
            fit_outline(bowtie)

    def test_clockwise_rejected(self) -> None:
        with pytest.raises(InvalidPolygonError, match="counter-clockwise"):
            fit_outline(SQUARE[::-1])


class TestEvaluation:
    """Test point evaluation against a direct summation."""

    @pytest.mark.parametrize('phi', [0.0, 0.1, 0.37, 0.5, 0.999])
    def test_matches_summation(self, box_outline, phi: float) -> None:
        assert np.allclose(eval_point(box_outline, phi), outline_point_by_summation(box_outline, phi), atol=1e-12)

    def test_unnormalized_matches_summation(self) -> None:
        outline = fit_outline(circle_vertices(0.075, 0.01), normalized=False)
        for phi in (0.05, 0.6):
            assert np.allclose(eval_point(outline, phi), outline_point_by_summation(outline, phi), atol=1e-12)

    def test_periodicity(self, box_outline) -> None:
        for phi in np.linspace(0.0, 1.0, 17):
            base = eval_point(box_outline, phi)
            assert np.allclose(eval_point(box_outline, phi + 1.0), base, atol=1e-12)
            assert np.allclose(eval_point(box_outline, phi - 3.0), base, atol=1e-12)

    def test_rotational_symmetry(self, circle_outline) -> None:
        r0 = np.linalg.norm(eval_point(circle_outline, 0.0))
        r1 = np.linalg.norm(eval_point(circle_outline, 0.25))
        assert r0 == pytest.approx(r1, abs=1e-12)
        assert r0 < 0.075

    def test_square_corner_is_interior(self) -> None:
        point = eval_point(fit_outline(SQUARE), 0.0)
        assert abs(point[0]) < 1.0 and abs(point[1]) < 1.0
        assert point[0] < 0.0 and point[1] < 0.0

    def test_non_finite_parameter_rejected(self, box_outline) -> None:
        with pytest.raises(ValueError, match="finite"):
            eval_point(box_outline, float('nan'))

    def test_symbolic_curve_matches_numeric(self, box_outline) -> None:
        function = outline_function(box_outline)
        for phi in (0.02, 0.4, 0.83):
            point, normal, tangent = function(phi)
            expected_tangent, expected_normal = eval_frame(box_outline, phi)
            assert np.allclose(np.asarray(point).reshape(-1), eval_point(box_outline, phi), atol=1e-12)
            assert np.allclose(np.asarray(normal).reshape(-1), expected_normal, atol=1e-9)
            assert np.allclose(np.asarray(tangent).reshape(-1), expected_tangent, atol=1e-9)


class TestCoefficients:
    """Test partition of unity and convex hull containment."""

    def test_unnormalized_sum_near_one(self, circle_outline) -> None:
        for phi in np.linspace(0.0, 1.0, 1000, endpoint=False):
            assert abs(coefficients(circle_outline, phi, normalized=False).sum() - 1.0) < 1e-3

    def test_normalized_sum_exactly_one(self, box_outline) -> None:
        for phi in np.linspace(0.0, 1.0, 200, endpoint=False):
            assert coefficients(box_outline, phi).sum() == pytest.approx(1.0, abs=1e-12)

    def test_normalized_points_inside_hull(self, box_outline) -> None:
        hull = Polygon(box_outline.polygon.as_array()).convex_hull.buffer(1e-12)
        for x, y in sample_points(box_outline, np.linspace(0.0, 1.0, 500, endpoint=False)):
            assert hull.covers(Point(x, y))


class TestFrame:
    """Test tangents, normals and derivatives."""

    def test_unit_and_orthogonal(self, box_outline) -> None:
        for phi in np.linspace(0.0, 1.0, 50, endpoint=False):
            tangent, normal = eval_frame(box_outline, phi)
            assert np.linalg.norm(tangent) == pytest.approx(1.0)
            assert np.linalg.norm(normal) == pytest.approx(1.0)
            assert tangent @ normal == pytest.approx(0.0, abs=1e-12)

    def test_circle_normal_is_radial(self, circle_outline) -> None:
        for phi in np.linspace(0.0, 1.0, 40, endpoint=False):
            point = eval_point(circle_outline, phi)
            _, normal = eval_frame(circle_outline, phi)
            radial = point / np.linalg.norm(point)
            assert math.acos(min(1.0, float(radial @ normal))) < 1e-2

    def test_box_bottom_normal_points_down(self, box_outline) -> None:
        # vertex 14 of 96 is the middle of the bottom side
        _, normal = eval_frame(box_outline, 14 / 96)
        assert np.allclose(normal, [0.0, -1.0], atol=1e-9)

    def test_derivative_matches_finite_difference(self, circle_outline) -> None:
        h = 1e-6
        for phi in np.linspace(0.0, 1.0, 20, endpoint=False):
            analytic = sample_derivatives(circle_outline, phi)[0]
            numeric = (eval_point(circle_outline, phi + h) - eval_point(circle_outline, phi - h)) / (2 * h)
            assert np.linalg.norm(analytic - numeric) <= 1e-6 * np.linalg.norm(analytic)


class TestArcLength:
    """Test curve_length() and arc_distance()."""

    def test_circle_length_near_circumference(self, circle_outline) -> None:
        assert curve_length(circle_outline) == pytest.approx(2 * math.pi * 0.075, rel=1e-2)

    def test_zero_distance(self, box_outline) -> None:
        assert arc_distance(box_outline, 0.3, 0.3) == 0.0

    def test_symmetric(self, box_outline) -> None:
        assert arc_distance(box_outline, 0.1, 0.4) == pytest.approx(arc_distance(box_outline, 0.4, 0.1), rel=1e-9)

    def test_half_turn_is_half_length(self, circle_outline) -> None:
        assert arc_distance(circle_outline, 0.0, 0.5) == pytest.approx(curve_length(circle_outline) / 2, rel=1e-6)

    def test_shorter_arc_is_used(self, circle_outline) -> None:
        wrapped = arc_distance(circle_outline, 0.05, 0.95)
        assert wrapped == pytest.approx(arc_distance(circle_outline, 0.95, 0.05), rel=1e-6)
        assert wrapped < 0.2 * curve_length(circle_outline)


class TestNearestParameter:
    def test_recovers_grid_parameter(self, circle_outline) -> None:
        assert nearest_parameter(circle_outline, eval_point(circle_outline, 0.25)) == pytest.approx(0.25)
