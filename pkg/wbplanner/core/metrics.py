"""State distance and reachability metrics."""

from __future__ import annotations

import numpy as np

from ..models.constraint_data import ControlBounds
from ..models.planning import StateWeights, WeightDimensionError
from ..models.system import ObjectModel
from .constraints import cone_terms
from .kinematics import object_input_matrix

# Index of α_u in the stacked state; the only angle wrapped by the distance
ANGLE_INDEX = 2


class SingularReachabilityError(ValueError):
    """Raised when B_u has no left pseudoinverse at the from-state."""

    pass


def wrap_angle(angle: float | np.ndarray) -> float | np.ndarray:
    """Wrap to (−π, π]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def weighted_distance(delta_q: np.ndarray, weights: StateWeights) -> float:
    """
    Squared weighted norm (W δq)ᵀ(W δq).

    The α_u component is wrapped to (−π, π] before weighting.

    Raises:
        WeightDimensionError: If delta_q and weights differ in length
    """
    delta = np.array(delta_q, dtype=float).reshape(-1)
    if delta.shape[0] != weights.size:
        raise WeightDimensionError(f"state difference has {delta.shape[0]} entries, weights have {weights.size}")
    if delta.shape[0] > ANGLE_INDEX:
        delta[ANGLE_INDEX] = wrap_angle(delta[ANGLE_INDEX])
    scaled = weights.as_array() * delta
    return float(scaled @ scaled)


def parameter_difference(phi_to: float, phi_from: float) -> float:
    """Signed outline parameter difference wrapped to [−0.5, 0.5)."""
    return float((phi_to - phi_from + 0.5) % 1.0 - 0.5)


def pushing_control(obj: ObjectModel, q_u_from: np.ndarray, q_u_target: np.ndarray) -> np.ndarray:
    """
    Least-squares control ũ_u = B_u⁺ (q_u^f − q_u) of the object block.

    Raises:
        SingularReachabilityError: If B_uᵀB_u is rank deficient
    """
    q_from = np.asarray(q_u_from, dtype=float)
    q_target = np.asarray(q_u_target, dtype=float)
    b_u = object_input_matrix(obj, q_from)
    if np.linalg.matrix_rank(b_u.T @ b_u) < b_u.shape[1]:
        raise SingularReachabilityError("B_u^T B_u is rank deficient")
    delta = q_target - q_from
    delta[2] = wrap_angle(delta[2])
    delta[3] = parameter_difference(q_target[3], q_from[3])
    return np.linalg.solve(b_u.T @ b_u, b_u.T @ delta)


def reachability(
    obj: ObjectModel,
    q_u_from: np.ndarray,
    q_u_target: np.ndarray,
    gamma_0: float,
    mu: float,
    bounds: ControlBounds | None = None,
) -> float:
    """
    Reachability exp(−‖ũ‖ − γ) in (0, 1].

    ũ is divided by the control bound scale of (λ_n, λ_t, v_u) when bounds
    are given; γ is gamma_0 when the impulse leaves the friction cone and 0
    otherwise, with ũ = 0 counted as inside.

    Raises:
        SingularReachabilityError: If B_u has no left pseudoinverse
    """
    control = pushing_control(obj, q_u_from, q_u_target)
    scaled = control / bounds.scale[:3] if bounds is not None else control
    inside = min(cone_terms(control[0], control[1], mu)) >= 0.0
    gamma = 0.0 if inside else gamma_0
    return float(np.exp(-np.linalg.norm(scaled) - gamma))
