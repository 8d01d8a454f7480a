"""Planner data models: weights, tree memory, guides and results."""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from .system import ControlInput, SystemState
from .types import Phase, StopReason


class WeightDimensionError(ValueError):
    """Raised when a state difference and a weight vector disagree in length."""

    pass


@dataclass(frozen=True, slots=True)
class StateWeights:
    """
    Diagonal weights W of the state distance.

    Attributes:
        diagonal: Entries for (x_u, y_u, α_u[, φ_u[, θ_1..θ_Na, φ_a]]); units 1/m or 1/rad
    """

    diagonal: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.diagonal) == 0:
            raise ValueError("weights need at least one entry")
        if any(w < 0 for w in self.diagonal):
            raise ValueError(f"weights must be non-negative, got {self.diagonal}")
        if not any(w > 0 for w in self.diagonal):
            raise ValueError("at least one weight must be positive")

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.diagonal, dtype=float)

    def truncated(self, size: int) -> StateWeights:
        """Leading entries only, e.g. the object pose block of a full-state weight."""
        if size > self.size:
            raise WeightDimensionError(f"cannot take {size} entries from {self.size} weights")
        return StateWeights(self.diagonal[:size])


@dataclass(frozen=True, slots=True)
class TreeEdge:
    """
    Control-labelled edge into a node.

    Attributes:
        parent: Index of the parent node
        control: Applied control
        phase: Contact phase of the transition
    """

    parent: int
    control: ControlInput
    phase: Phase


@dataclass(frozen=True, slots=True)
class TreeNode:
    """
    Node of the tree memory.

    Attributes:
        index: Creation order (root is 0)
        state: Stored state, φ wrapped
        edge: Incoming edge (None for the root)
        depth: Number of edges from the root
    """

    index: int
    state: SystemState
    edge: TreeEdge | None
    depth: int

    @property
    def parent(self) -> int | None:
        return self.edge.parent if self.edge is not None else None


class PlanTree:
    """Append-only tree of states; nodes are only ever added as children."""

    def __init__(self, root: SystemState) -> None:
        self._nodes: list[TreeNode] = [TreeNode(index=0, state=root.wrapped(), edge=None, depth=0)]
        self._children: dict[int, list[int]] = {0: []}

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[TreeNode]:
        return iter(self._nodes)

    def __getitem__(self, index: int) -> TreeNode:
        return self._nodes[index]

    @property
    def root(self) -> TreeNode:
        return self._nodes[0]

    @property
    def nodes(self) -> list[TreeNode]:
        return list(self._nodes)

    def add_child(self, parent: int, state: SystemState, control: ControlInput, phase: Phase) -> TreeNode:
        """Append a child of an existing node."""
        if not 0 <= parent < len(self._nodes):
            raise IndexError(f"parent {parent} is not in the tree")
        node = TreeNode(
            index=len(self._nodes),
            state=state.wrapped(),
            edge=TreeEdge(parent=parent, control=control, phase=phase),
            depth=self._nodes[parent].depth + 1,
        )
        self._nodes.append(node)
        self._children[parent].append(node.index)
        self._children[node.index] = []
        return node

    def children(self, index: int) -> list[int]:
        return list(self._children[index])

    def path_to(self, index: int) -> list[TreeNode]:
        """Nodes from the root to index, inclusive."""
        path = [self._nodes[index]]
        while path[-1].edge is not None:
            path.append(self._nodes[path[-1].edge.parent])
        return path[::-1]

    def edges(self) -> Iterator[tuple[TreeNode, TreeNode]]:
        """(parent, child) pairs in creation order of the child."""
        for node in self._nodes[1:]:
            assert node.edge is not None
            yield self._nodes[node.edge.parent], node


@dataclass(frozen=True, eq=False)
class ContactPlan:
    """
    Result of contact planning for one sampled context.

    Attributes:
        n_a: Link used for contact
        phi_u0: Object contact parameter
        phi_a0: Robot contact parameter
        q_a0: Joint configuration at first contact
        preview_states: Free-pushing preview q_u^(0..N_c), shape (N_c + 1, 4)
        preview_controls: Preview controls u_u^(0..N_c-1), shape (N_c, 3)
        objective: Final objective value
    """

    n_a: int
    phi_u0: float
    phi_a0: float
    q_a0: np.ndarray
    preview_states: np.ndarray
    preview_controls: np.ndarray
    objective: float = 0.0

    def contact_state(self, q_u_pose: np.ndarray) -> SystemState:
        """State in contact at the given object pose."""
        q_u = np.array([*np.asarray(q_u_pose, dtype=float)[:3], self.phi_u0])
        return SystemState(q_u=q_u, q_a=np.append(self.q_a0, self.phi_a0), n_a=self.n_a).wrapped()


@dataclass(frozen=True, eq=False)
class GuidePair:
    """
    Guides produced for one pipeline iteration.

    Attributes:
        contact_free_path: Waypoints p_a^t (K, 2), world frame
        in_contact_guide: Object states q_u^t (N_l + 1, 4)
        guide_controls: Free pusher controls u_u^t (N_l, 3)
    """

    contact_free_path: np.ndarray
    in_contact_guide: np.ndarray
    guide_controls: np.ndarray

    @property
    def horizon(self) -> int:
        return int(self.guide_controls.shape[0])


@dataclass(slots=True)
class TrackingOutcome:
    """
    Nodes appended by one tracking run and why it stopped.

    Attributes:
        nodes: Appended nodes in order
        stop_reason: Stopping condition that fired
        reached_end: True when the end of the guide was reached
    """

    nodes: list[TreeNode]
    stop_reason: StopReason
    reached_end: bool = False

    @property
    def last(self) -> TreeNode | None:
        return self.nodes[-1] if self.nodes else None


@dataclass(slots=True)
class PlanStats:
    """
    Tree statistics of a planner run.

    Attributes:
        iterations: Pipeline iterations executed
        node_count: Nodes in the tree
        stage_times: Wall time per stage (s)
        failures: Failure count per stage
        stop_reasons: Tracking stop reason counts
        best_goal_distance: Smallest weighted distance to the goal over all nodes
    """

    iterations: int = 0
    node_count: int = 1
    stage_times: dict[str, float] = field(default_factory=dict)
    failures: dict[str, int] = field(default_factory=dict)
    stop_reasons: dict[str, int] = field(default_factory=dict)
    best_goal_distance: float = float('inf')

    def count_failure(self, stage: str) -> None:
        self.failures[stage] = self.failures.get(stage, 0) + 1

    def count_stop(self, reason: str) -> None:
        self.stop_reasons[reason] = self.stop_reasons.get(reason, 0) + 1

    @property
    def wall_time(self) -> float:
        return float(sum(self.stage_times.values()))


@dataclass(slots=True)
class PlanResult:
    """
    Outcome of a planner run.

    Attributes:
        success: True when a node reached the goal tolerance
        states: Extracted states root → goal node
        controls: Controls of the extracted edges (len(states) - 1)
        phases: Phase of each extracted edge
        node_indices: Tree indices of the extracted states
        cost: Dijkstra path cost
        stats: Tree statistics
        tree: Tree memory, when kept
    """

    success: bool
    states: list[SystemState] = field(default_factory=list)
    controls: list[ControlInput] = field(default_factory=list)
    phases: list[Phase] = field(default_factory=list)
    node_indices: list[int] = field(default_factory=list)
    cost: float = 0.0
    stats: PlanStats = field(default_factory=PlanStats)
    tree: PlanTree | None = None
