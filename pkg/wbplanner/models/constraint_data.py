"""Constraint residual and bound models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .types import Point2D, Vector2D


@dataclass(frozen=True, eq=False)
class ConstraintResidual:
    """
    Uniform view of constraint values.

    Attributes:
        equalities: Residuals with target 0
        inequalities: Residuals with target >= 0
        complementarities: (a, b) pairs with target a·b = 0
    """

    equalities: np.ndarray = field(default_factory=lambda: np.zeros(0))
    inequalities: np.ndarray = field(default_factory=lambda: np.zeros(0))
    complementarities: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, 'equalities', np.asarray(self.equalities, dtype=float).reshape(-1))
        object.__setattr__(self, 'inequalities', np.asarray(self.inequalities, dtype=float).reshape(-1))
        object.__setattr__(
            self, 'complementarities', tuple((float(a), float(b)) for a, b in self.complementarities)
        )

    @property
    def products(self) -> np.ndarray:
        return np.array([a * b for a, b in self.complementarities], dtype=float)

    def max_violation(self) -> float:
        """Largest violation over all residual kinds (0 when satisfied)."""
        worst = 0.0
        if self.equalities.size:
            worst = max(worst, float(np.max(np.abs(self.equalities))))
        if self.inequalities.size:
            worst = max(worst, float(np.max(-self.inequalities)))
        if self.complementarities:
            worst = max(worst, float(np.max(np.abs(self.products))))
        return worst

    def is_satisfied(self, tolerance: float) -> bool:
        return self.max_violation() <= tolerance

    def merged(self, other: ConstraintResidual) -> ConstraintResidual:
        return ConstraintResidual(
            equalities=np.concatenate([self.equalities, other.equalities]),
            inequalities=np.concatenate([self.inequalities, other.inequalities]),
            complementarities=self.complementarities + other.complementarities,
        )


@dataclass(frozen=True, eq=False)
class HalfSpaceSet:
    """
    World-frame half-spaces enclosing the object polygon.

    Attributes:
        faces: (origin p_h, outward unit normal n_h) per face
    """

    faces: tuple[tuple[Point2D, Vector2D], ...]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        origins = np.array([origin for origin, _ in self.faces], dtype=float).reshape(-1, 2)
        normals = np.array([normal for _, normal in self.faces], dtype=float).reshape(-1, 2)
        return origins, normals

    def signed_values(self, points: np.ndarray) -> np.ndarray:
        """n_h·(p − p_h) for every face (rows) and point (columns)."""
        origins, normals = self.arrays()
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return normals @ points.T - np.sum(normals * origins, axis=1)[:, None]


def _bound_array(values: np.ndarray | list[float] | tuple[float, ...]) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateBounds:
    """
    Box Q_B on the stacked state (x_u, y_u, α_u, φ_u, θ_1..θ_Na, φ_a).

    Attributes:
        lower: Lower bounds (may be -inf)
        upper: Upper bounds (may be +inf)
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower, upper = _bound_array(self.lower), _bound_array(self.upper)
        if lower.shape != upper.shape:
            raise ValueError("state bounds lower/upper must have the same length")
        if np.any(lower > upper):
            raise ValueError("state bounds must satisfy lower <= upper")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)


@dataclass(frozen=True, eq=False)
class ControlBounds:
    """
    Box U_B on the stacked control (λ_n, λ_t, v_u, τ_1..τ_Na, v_a).

    Attributes:
        lower: Lower bounds
        upper: Upper bounds
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower, upper = _bound_array(self.lower), _bound_array(self.upper)
        if lower.shape != upper.shape:
            raise ValueError("control bounds lower/upper must have the same length")
        if np.any(lower > upper):
            raise ValueError("control bounds must satisfy lower <= upper")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @property
    def scale(self) -> np.ndarray:
        """Per-component magnitude used to make controls dimensionless."""
        magnitude = np.maximum(np.abs(self.lower), np.abs(self.upper))
        return np.where(magnitude > 0, magnitude, 1.0)
