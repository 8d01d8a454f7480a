"""Robot, object, state and control models."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .outline import NonConvexPolygonError, ParametricOutline, find_reflex_vertex
from .types import Point2D, Pose2D, Vector2D


class InvalidLinkError(ValueError):
    """Raised when an active link index is outside 1..N_a."""

    pass


class ScenarioValidationError(ValueError):
    """Raised when a scenario violates its invariants; lists every issue found."""

    def __init__(self, issues: list[str]) -> None:
        self.issues = list(issues)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.issues))


def validate_robot_values(
    n_joints: int | None = None,
    epsilon: float | None = None,
    dt: float | None = None,
    joint_limits: tuple[tuple[float, float], ...] | None = None,
    torque_limits: tuple[float, ...] | None = None,
) -> None:
    """Validate robot numeric values.

    Raises:
        ValueError: If any value violates its constraint
    """
    if n_joints is not None and n_joints < 1:
        raise ValueError(f"robot needs at least one joint, got {n_joints}")
    if epsilon is not None and not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if dt is not None and not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if joint_limits is not None:
        for i, (lower, upper) in enumerate(joint_limits):
            if not lower < upper:
                raise ValueError(f"joint {i + 1} limits must satisfy lower < upper, got ({lower}, {upper})")
    if torque_limits is not None:
        for i, limit in enumerate(torque_limits):
            if not limit > 0:
                raise ValueError(f"joint {i + 1} torque limit must be positive, got {limit}")


def validate_object_values(
    limit_surface_coeff: float | None = None,
    friction_mu: float | None = None,
) -> None:
    """Validate object numeric values.

    Raises:
        ValueError: If any value violates its constraint
    """
    if limit_surface_coeff is not None and not limit_surface_coeff > 0:
        raise ValueError(f"limit_surface_coeff must be positive, got {limit_surface_coeff}")
    if friction_mu is not None and not friction_mu > 0:
        raise ValueError(f"friction_mu must be positive, got {friction_mu}")


@dataclass(frozen=True, eq=False)
class RobotModel:
    """
    Planar serial robot with revolute joints about e_z.

    Link i has its frame at joint i with the x-axis along the link;
    its outline is expressed in that frame.

    Attributes:
        link_lengths: Distance from joint i to joint i+1 (meters)
        link_outlines: Parametric outline per link (link frame)
        base_pose: (x, y, angle) of the first joint in world
        joint_limits: (lower, upper) radians per joint
        torque_limits: Symmetric torque bound per joint (N·m)
        epsilon: Quasistatic regularization ε (N·m·s/rad)
        dt: Planning time step Δt (s)
    """

    link_lengths: tuple[float, ...]
    link_outlines: tuple[ParametricOutline, ...]
    base_pose: Pose2D
    joint_limits: tuple[tuple[float, float], ...]
    torque_limits: tuple[float, ...]
    epsilon: float = 1.0
    dt: float = 0.1

    def __post_init__(self) -> None:
        n = len(self.link_lengths)
        if not (len(self.link_outlines) == len(self.joint_limits) == len(self.torque_limits) == n):
            raise ValueError("link lengths, outlines, joint limits and torque limits must have equal counts")
        if any(not length > 0 for length in self.link_lengths):
            raise ValueError(f"link lengths must be positive, got {self.link_lengths}")
        validate_robot_values(
            n_joints=n,
            epsilon=self.epsilon,
            dt=self.dt,
            joint_limits=self.joint_limits,
            torque_limits=self.torque_limits,
        )

    @property
    def n_joints(self) -> int:
        return len(self.link_lengths)

    def check_link(self, n_a: int) -> None:
        """Raise InvalidLinkError unless 1 <= n_a <= N_a."""
        if not 1 <= n_a <= self.n_joints:
            raise InvalidLinkError(f"active link must be in [1, {self.n_joints}], got {n_a}")


@dataclass(frozen=True, eq=False)
class ObjectModel:
    """
    Convex object pushed on the plane.

    Attributes:
        outline: Parametric outline (body frame)
        limit_surface_coeff: Characteristic length k_L of the ellipsoidal limit surface (m)
        friction_mu: Robot-object friction coefficient μ
        polygon_faces: Half-spaces ((p_h), (n_h)) in body frame, outward unit normals
    """

    outline: ParametricOutline
    limit_surface_coeff: float
    friction_mu: float
    polygon_faces: tuple[tuple[Point2D, Vector2D], ...]

    def __post_init__(self) -> None:
        validate_object_values(
            limit_surface_coeff=self.limit_surface_coeff,
            friction_mu=self.friction_mu,
        )
        vertices = self.outline.polygon.as_array()
        reflex = find_reflex_vertex(vertices)
        if reflex is not None:
            raise NonConvexPolygonError(reflex, self.outline.polygon.vertices[reflex])
        if not self.polygon_faces:
            raise ValueError("object needs at least one half-space face")
        for i, (_, normal) in enumerate(self.polygon_faces):
            if abs(math.hypot(*normal) - 1.0) > 1e-9:
                raise ValueError(f"face {i} normal is not unit length")

    def face_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Face origins (H, 2) and outward normals (H, 2) in body frame."""
        origins = np.array([origin for origin, _ in self.polygon_faces], dtype=float)
        normals = np.array([normal for _, normal in self.polygon_faces], dtype=float)
        return origins, normals


def wrap_parameter(phi: float) -> float:
    """Wrap an outline parameter into [0, 1)."""
    wrapped = phi - math.floor(phi)
    return 0.0 if wrapped >= 1.0 else wrapped


def _frozen(values: np.ndarray | list[float] | tuple[float, ...], size: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if array.shape[0] != size:
        raise ValueError(f"{name} must have {size} entries, got {array.shape[0]}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SystemState:
    """
    Full planning state q = (q_u, q_a) plus the active link.

    Attributes:
        q_u: (x_u, y_u, α_u, φ_u) object pose and object contact parameter
        q_a: (θ_1..θ_Na, φ_a) joint angles and robot contact parameter
        n_a: Active link index, 1-based
    """

    q_u: np.ndarray
    q_a: np.ndarray
    n_a: int

    def __post_init__(self) -> None:
        q_u = _frozen(self.q_u, 4, 'q_u')
        q_a = np.array(self.q_a, dtype=float).reshape(-1)
        if q_a.shape[0] < 2:
            raise ValueError("q_a must hold at least one joint angle and φ_a")
        q_a.setflags(write=False)
        object.__setattr__(self, 'q_u', q_u)
        object.__setattr__(self, 'q_a', q_a)
        if not 1 <= self.n_a <= q_a.shape[0] - 1:
            raise InvalidLinkError(f"active link must be in [1, {q_a.shape[0] - 1}], got {self.n_a}")

    @property
    def n_joints(self) -> int:
        return self.q_a.shape[0] - 1

    @property
    def pose(self) -> np.ndarray:
        """Object pose (x_u, y_u, α_u)."""
        return self.q_u[:3]

    @property
    def phi_u(self) -> float:
        return float(self.q_u[3])

    @property
    def theta(self) -> np.ndarray:
        return self.q_a[:-1]

    @property
    def phi_a(self) -> float:
        return float(self.q_a[-1])

    def vector(self) -> np.ndarray:
        """Stacked (q_u, q_a)."""
        return np.concatenate([self.q_u, self.q_a])

    @classmethod
    def from_vector(cls, values: np.ndarray, n_a: int) -> SystemState:
        values = np.asarray(values, dtype=float).reshape(-1)
        return cls(q_u=values[:4], q_a=values[4:], n_a=n_a)

    def wrapped(self) -> SystemState:
        """Copy with φ_u and φ_a wrapped to [0, 1)."""
        q_u = self.q_u.copy()
        q_a = self.q_a.copy()
        q_u[3] = wrap_parameter(q_u[3])
        q_a[-1] = wrap_parameter(q_a[-1])
        return SystemState(q_u=q_u, q_a=q_a, n_a=self.n_a)

    def with_link(self, n_a: int) -> SystemState:
        return SystemState(q_u=self.q_u, q_a=self.q_a, n_a=n_a)

    def __repr__(self) -> str:
        return (f"SystemState(q_u={np.array2string(self.q_u, precision=4)}, "
                f"q_a={np.array2string(self.q_a, precision=4)}, n_a={self.n_a})")


@dataclass(frozen=True, eq=False)
class ControlInput:
    """
    Control u = (u_u, u_a).

    Attributes:
        u_u: (λ_n, λ_t, v_u) contact impulse (N·s) and object sliding rate
        u_a: (τ_1..τ_Na, v_a) joint torques (N·m) and robot sliding rate
    """

    u_u: np.ndarray
    u_a: np.ndarray

    def __post_init__(self) -> None:
        u_u = _frozen(self.u_u, 3, 'u_u')
        u_a = np.array(self.u_a, dtype=float).reshape(-1)
        if u_a.shape[0] < 2:
            raise ValueError("u_a must hold at least one torque and v_a")
        u_a.setflags(write=False)
        object.__setattr__(self, 'u_u', u_u)
        object.__setattr__(self, 'u_a', u_a)

    @property
    def lambda_n(self) -> float:
        return float(self.u_u[0])

    @property
    def lambda_t(self) -> float:
        return float(self.u_u[1])

    @property
    def v_u(self) -> float:
        return float(self.u_u[2])

    @property
    def tau(self) -> np.ndarray:
        return self.u_a[:-1]

    @property
    def v_a(self) -> float:
        return float(self.u_a[-1])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.u_u, self.u_a])

    @classmethod
    def from_vector(cls, values: np.ndarray) -> ControlInput:
        values = np.asarray(values, dtype=float).reshape(-1)
        return cls(u_u=values[:3], u_a=values[3:])

    @classmethod
    def zeros(cls, n_joints: int) -> ControlInput:
        return cls(u_u=np.zeros(3), u_a=np.zeros(n_joints + 1))


@dataclass(frozen=True, slots=True)
class LinkPose:
    """
    World pose of a link frame.

    Attributes:
        origin: Joint position (meters, world)
        angle: Link orientation (radians, world)
    """

    origin: Point2D
    angle: float
