"""Parametric outline fitted through polygon vertices with Gaussian coefficients.

p(φ) = p̄ + Σ_n b_n(φ)(p_n − p̄), where b_n is a Gaussian of width σ centred
at φ_n = n/N_p and summed over the periodic images of φ. Numeric evaluation
is vectorized with numpy; `outline_function` builds the same curve as a
CasADi expression for use inside the optimization problems.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from functools import lru_cache

import casadi as ca
import numpy as np
from scipy import integrate

from ..models.outline import OutlinePolygon, ParametricOutline
from ..models.types import Point2D
from .tolerances import ARC_QUADRATURE_LIMIT, PERIODIC_IMAGES, SINGULAR_FRAME


class SingularFrameError(ValueError):
    """Raised when dp/dφ vanishes and no contact frame exists."""

    pass


def fit_outline(
    polygon: OutlinePolygon | np.ndarray | Sequence[Point2D],
    sigma_override: float | None = None,
    normalized: bool = True,
) -> ParametricOutline:
    """
    Fit a parametric outline through polygon vertices.

    Args:
        polygon: Outline polygon, or raw counter-clockwise vertices
        sigma_override: Gaussian width; defaults to 1/N_p
        normalized: Divide coefficients by their sum at evaluation time

    Returns:
        ParametricOutline with φ_n = n/N_p assigned in vertex order

    Raises:
        InvalidPolygonError: Fewer than 3 vertices, self-intersection or clockwise order
        ValueError: If sigma_override is not positive
    """
    if not isinstance(polygon, OutlinePolygon):
        polygon = OutlinePolygon(tuple(tuple(map(float, vertex)) for vertex in np.asarray(polygon, dtype=float)))
    sigma = 1.0 / polygon.n_points if sigma_override is None else float(sigma_override)
    return ParametricOutline(polygon=polygon, sigma=sigma, normalized=normalized)


def _kernel(outline: ParametricOutline, phi: np.ndarray, normalized: bool) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients b_n(φ) and their φ-derivatives, shape (len(phi), N_p)."""
    wrapped = phi - np.floor(phi)
    delta = wrapped[:, None] - outline.nodes[None, :]
    sigma = outline.sigma
    weights = np.zeros_like(delta)
    slopes = np.zeros_like(delta)
    for image in PERIODIC_IMAGES:
        z = (delta + image) / sigma
        gauss = np.exp(-z * z)
        weights += gauss
        slopes += (-2.0 * z / sigma) * gauss
    prefactor = 1.0 / (outline.n_points * sigma * math.sqrt(math.pi))
    weights *= prefactor
    slopes *= prefactor
    if not normalized:
        return weights, slopes
    total = weights.sum(axis=1, keepdims=True)
    total_slope = slopes.sum(axis=1, keepdims=True)
    return weights / total, (slopes * total - weights * total_slope) / (total * total)


def _as_parameters(phi: float | np.ndarray) -> np.ndarray:
    values = np.asarray(phi, dtype=float).reshape(-1)
    if not np.all(np.isfinite(values)):
        raise ValueError("outline parameter must be finite")
    return values


def coefficients(outline: ParametricOutline, phi: float, normalized: bool | None = None) -> np.ndarray:
    """Coefficient vector b(φ) of length N_p."""
    flag = outline.normalized if normalized is None else normalized
    weights, _ = _kernel(outline, _as_parameters(phi), flag)
    return weights[0]


def sample_points(outline: ParametricOutline, phis: float | np.ndarray) -> np.ndarray:
    """Body-frame points p(φ) for each parameter, shape (k, 2)."""
    weights, _ = _kernel(outline, _as_parameters(phis), outline.normalized)
    return outline.centroid + weights @ outline.offsets


def sample_derivatives(outline: ParametricOutline, phis: float | np.ndarray) -> np.ndarray:
    """dp/dφ for each parameter, shape (k, 2)."""
    _, slopes = _kernel(outline, _as_parameters(phis), outline.normalized)
    return slopes @ outline.offsets


def eval_point(outline: ParametricOutline, phi: float) -> np.ndarray:
    """Body-frame point p(φ); φ is wrapped to [0, 1)."""
    return sample_points(outline, phi)[0]


def eval_frame(outline: ParametricOutline, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Unit tangent and outward normal at φ.

    The tangent follows dp/dφ; the normal is the tangent rotated by -90°,
    which points outward for counter-clockwise outlines.

    Raises:
        SingularFrameError: If |dp/dφ| < SINGULAR_FRAME
    """
    derivative = sample_derivatives(outline, phi)[0]
    norm = float(np.hypot(*derivative))
    if norm < SINGULAR_FRAME:
        raise SingularFrameError(f"dp/dphi vanishes at phi={phi:.6g} (norm {norm:.3g})")
    tangent = derivative / norm
    normal = np.array([tangent[1], -tangent[0]])
    return tangent, normal


def _speed(outline: ParametricOutline, phi: float) -> float:
    return float(np.hypot(*sample_derivatives(outline, phi)[0]))


def curve_length(outline: ParametricOutline) -> float:
    """Perimeter of the fitted curve by quadrature of |dp/dφ| over one period."""
    value, _ = integrate.quad(
        lambda phi: _speed(outline, phi), 0.0, 1.0, limit=ARC_QUADRATURE_LIMIT, points=outline.nodes[1:]
    )
    return float(value)


def arc_distance(outline: ParametricOutline, phi_a: float, phi_b: float) -> float:
    """Length of the shorter arc between two parameters (meters)."""
    span = (float(phi_b) - float(phi_a)) % 1.0
    if span == 0.0:
        return 0.0
    forward, _ = integrate.quad(
        lambda phi: _speed(outline, phi), float(phi_a), float(phi_a) + span, limit=ARC_QUADRATURE_LIMIT
    )
    return float(min(forward, curve_length(outline) - forward))


def nearest_parameter(outline: ParametricOutline, point: np.ndarray, resolution: int = 512) -> float:
    """Parameter of the sampled outline point closest to a body-frame point."""
    grid = np.arange(resolution) / resolution
    distances = np.linalg.norm(sample_points(outline, grid) - np.asarray(point, dtype=float), axis=1)
    return float(grid[int(np.argmin(distances))])


def symbolic_point(outline: ParametricOutline, phi: ca.SX) -> ca.SX:
    """CasADi expression of p(φ) for a scalar symbolic parameter."""
    wrapped = phi - ca.floor(phi)
    delta = wrapped - ca.DM(outline.nodes)
    weights = 0
    for image in PERIODIC_IMAGES:
        z = (delta + image) / outline.sigma
        weights = weights + ca.exp(-z * z)
    weights = weights / (outline.n_points * outline.sigma * math.sqrt(math.pi))
    if outline.normalized:
        weights = weights / ca.sum1(weights)
    return ca.DM(outline.centroid) + ca.mtimes(ca.DM(outline.offsets).T, weights)


@lru_cache(maxsize=None)
def outline_function(outline: ParametricOutline) -> ca.Function:
    """CasADi function φ -> (point, outward normal, tangent) in body frame."""
    phi = ca.SX.sym('phi')
    point = symbolic_point(outline, phi)
    derivative = ca.jacobian(point, phi)
    tangent = derivative / ca.norm_2(derivative)
    normal = ca.vertcat(tangent[1], -tangent[0])
    return ca.Function('outline', [phi], [point, normal, tangent], ['phi'], ['point', 'normal', 'tangent'])
