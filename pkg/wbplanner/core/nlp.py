"""Nonlinear program assembly and the interior-point solver contract.

A Program registers named variable and parameter blocks as CasADi SX
symbols, collects an objective with equality (= 0), inequality (>= 0) and
complementarity (|a·b| <= δ) constraints, and compiles an IPOPT solver the
first time it is solved with a given set of options. Parameters, bounds,
initial values and δ can change between solves without recompiling, so the
planner keeps one Program per problem shape and re-solves it.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

import casadi as ca
import numpy as np

from ..models.types import SolveStatus
from . import tolerances as tol
from .options import SolverOptions

logger = logging.getLogger(__name__)

# IPOPT return_status strings mapped to report status
_IPOPT_STATUS: dict[str, SolveStatus] = {
    'Solve_Succeeded': 'optimal',
    'Solved_To_Acceptable_Level': 'acceptable',
    'Feasible_Point_Found': 'acceptable',
    'Infeasible_Problem_Detected': 'infeasible',
    'Restoration_Failed': 'infeasible',
    'Not_Enough_Degrees_Of_Freedom': 'infeasible',
    'Maximum_Iterations_Exceeded': 'max_iter',
    'Maximum_CpuTime_Exceeded': 'max_iter',
    'Maximum_WallTime_Exceeded': 'max_iter',
    'Diverging_Iterates': 'diverged',
    'Invalid_Number_Detected': 'diverged',
    'Error_In_Step_Computation': 'diverged',
}


class ProgramAssemblyError(ValueError):
    """Raised when a program references unregistered symbols or has inconsistent dimensions."""

    pass


@dataclass(slots=True)
class _Block:
    """Registered variable or parameter block."""

    name: str
    symbol: ca.SX
    offset: int
    lower: np.ndarray
    upper: np.ndarray
    values: np.ndarray

    @property
    def size(self) -> int:
        return int(self.values.shape[0])


@dataclass(slots=True)
class SolveReport:
    """
    Outcome of one solve.

    Attributes:
        status: optimal, acceptable, infeasible, max_iter or diverged
        values: Solution per variable block
        objective: Final objective value
        max_violation: Independently re-evaluated constraint violation
        iterations: Interior point iterations
        wall_time: Seconds spent in the solver
        solver_status: Raw IPOPT status string
    """

    status: SolveStatus
    values: dict[str, np.ndarray] = field(default_factory=dict)
    objective: float = float('inf')
    max_violation: float = float('inf')
    iterations: int = 0
    wall_time: float = 0.0
    solver_status: str = ''

    @property
    def success(self) -> bool:
        return self.status in ('optimal', 'acceptable')

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]


def _as_values(value: float | Sequence[float] | np.ndarray, size: int, label: str) -> np.ndarray:
    array = np.asarray(value, dtype=float).reshape(-1)
    if array.shape[0] == 1 and size != 1:
        array = np.full(size, float(array[0]))
    if array.shape[0] != size:
        raise ProgramAssemblyError(f"{label} needs {size} values, got {array.shape[0]}")
    return array


class Program:
    """Builder of a nonlinear program over CasADi SX expressions."""

    def __init__(self, name: str = 'program') -> None:
        self.name = name
        self._variables: dict[str, _Block] = {}
        self._parameters: dict[str, _Block] = {}
        self._objective: ca.SX = ca.SX(0)
        self._equalities: list[ca.SX] = []
        self._inequalities: list[ca.SX] = []
        self._complementarities: list[ca.SX] = []
        self._relaxation = tol.COMPLEMENTARITY_TOL
        self._compiled: dict[tuple[float, ...], ca.Function] = {}
        self._residuals: ca.Function | None = None

    # --- registration ---

    def variable(
        self,
        name: str,
        size: int,
        lower: float | Sequence[float] | np.ndarray = -np.inf,
        upper: float | Sequence[float] | np.ndarray = np.inf,
        initial: float | Sequence[float] | np.ndarray = 0.0,
    ) -> ca.SX:
        """Register a decision variable block and return its symbol."""
        self._check_open(name)
        block = _Block(
            name=name,
            symbol=ca.SX.sym(name, size),
            offset=sum(b.size for b in self._variables.values()),
            lower=_as_values(lower, size, f"{name} lower bound"),
            upper=_as_values(upper, size, f"{name} upper bound"),
            values=_as_values(initial, size, f"{name} initial value"),
        )
        if np.any(block.lower > block.upper):
            raise ProgramAssemblyError(f"{name} has lower bounds above upper bounds")
        self._variables[name] = block
        return block.symbol

    def parameter(self, name: str, size: int, value: float | Sequence[float] | np.ndarray = 0.0) -> ca.SX:
        """Register a parameter block whose value may change between solves."""
        self._check_open(name)
        values = _as_values(value, size, f"{name} value")
        block = _Block(
            name=name,
            symbol=ca.SX.sym(name, size),
            offset=sum(b.size for b in self._parameters.values()),
            lower=values,
            upper=values,
            values=values,
        )
        self._parameters[name] = block
        return block.symbol

    def _check_open(self, name: str) -> None:
        if name in self._variables or name in self._parameters:
            raise ProgramAssemblyError(f"block {name!r} is already registered")
        if self._compiled or self._residuals is not None:
            raise ProgramAssemblyError("cannot add blocks after the program was compiled")

    def minimize(self, expression: ca.SX) -> None:
        if expression.numel() != 1:
            raise ProgramAssemblyError("objective must be scalar")
        self._objective = expression

    def add_equality(self, expression: ca.SX) -> None:
        """Constrain expression == 0."""
        self._equalities.append(ca.vec(ca.SX(expression)))

    def add_inequality(self, expression: ca.SX) -> None:
        """Constrain expression >= 0."""
        self._inequalities.append(ca.vec(ca.SX(expression)))

    def add_complementarity(self, first: ca.SX, second: ca.SX) -> None:
        """Constrain |first · second| <= δ elementwise; sign conditions are added separately."""
        first, second = ca.vec(ca.SX(first)), ca.vec(ca.SX(second))
        if first.numel() != second.numel():
            raise ProgramAssemblyError("complementarity pairs must have equal sizes")
        self._complementarities.append(first * second)

    # --- values ---

    @property
    def has_complementarities(self) -> bool:
        return bool(self._complementarities)

    @property
    def relaxation(self) -> float:
        return self._relaxation

    def set_relaxation(self, delta: float) -> None:
        if delta < 0:
            raise ValueError(f"complementarity relaxation cannot be negative, got {delta}")
        self._relaxation = float(delta)

    def set_parameter(self, name: str, value: float | Sequence[float] | np.ndarray) -> None:
        block = self._parameters[name]
        block.values = _as_values(value, block.size, f"{name} value")

    def set_initial(self, name: str, value: float | Sequence[float] | np.ndarray) -> None:
        block = self._variables[name]
        block.values = _as_values(value, block.size, f"{name} initial value")

    def set_bounds(
        self,
        name: str,
        lower: float | Sequence[float] | np.ndarray,
        upper: float | Sequence[float] | np.ndarray,
    ) -> None:
        block = self._variables[name]
        block.lower = _as_values(lower, block.size, f"{name} lower bound")
        block.upper = _as_values(upper, block.size, f"{name} upper bound")
        if np.any(block.lower > block.upper):
            raise ProgramAssemblyError(f"{name} has lower bounds above upper bounds")

    def initial(self, name: str) -> np.ndarray:
        return self._variables[name].values.copy()

    # --- assembly ---

    def _stack(self, blocks: dict[str, _Block], attribute: str) -> np.ndarray:
        parts = [getattr(block, attribute) for block in blocks.values()]
        return np.concatenate(parts) if parts else np.zeros(0)

    def _symbols(self, blocks: dict[str, _Block]) -> ca.SX:
        return ca.vertcat(*[block.symbol for block in blocks.values()]) if blocks else ca.SX(0, 1)

    def _constraint_groups(self) -> tuple[ca.SX, ca.SX, ca.SX]:
        def stacked(parts: list[ca.SX]) -> ca.SX:
            return ca.vertcat(*parts) if parts else ca.SX(0, 1)
        return stacked(self._equalities), stacked(self._inequalities), stacked(self._complementarities)

    def validate(self) -> None:
        """
        Check that every symbol in the objective and constraints is registered.

        Raises:
            ProgramAssemblyError: If an expression uses a foreign symbol
        """
        if not self._variables:
            raise ProgramAssemblyError(f"{self.name}: no decision variables")
        registered: set[str] = set()
        for block in [*self._variables.values(), *self._parameters.values()]:
            registered.update(str(s) for s in ca.symvar(block.symbol))
        expressions = [self._objective, *self._constraint_groups()]
        for expression in expressions:
            for symbol in ca.symvar(expression):
                if str(symbol) not in registered:
                    raise ProgramAssemblyError(f"{self.name}: expression uses unregistered symbol {symbol}")

    def _residual_function(self) -> ca.Function:
        if self._residuals is None:
            self.validate()
            x, p = self._symbols(self._variables), self._symbols(self._parameters)
            equalities, inequalities, products = self._constraint_groups()
            self._residuals = ca.Function(
                f'{self.name}_residuals', [x, p], [self._objective, equalities, inequalities, products],
                ['x', 'p'], ['f', 'eq', 'ineq', 'comp'],
            )
        return self._residuals

    def _solver(self, options: SolverOptions) -> ca.Function:
        key = (float(options.max_iter), options.feas_tol, options.opt_tol, options.time_budget)
        if key not in self._compiled:
            self.validate()
            x, p = self._symbols(self._variables), self._symbols(self._parameters)
            equalities, inequalities, products = self._constraint_groups()
            problem = {'x': x, 'p': p, 'f': self._objective, 'g': ca.vertcat(equalities, inequalities, products)}
            settings = {
                'ipopt.max_iter': int(options.max_iter),
                'ipopt.tol': options.opt_tol,
                'ipopt.constr_viol_tol': options.feas_tol,
                'ipopt.acceptable_constr_viol_tol': options.feas_tol,
                'ipopt.max_wall_time': options.time_budget,
                'ipopt.print_level': 0,
                'ipopt.sb': 'yes',
                'print_time': 0,
                'error_on_fail': False,
            }
            self._compiled[key] = ca.nlpsol(self.name, 'ipopt', problem, settings)
        return self._compiled[key]

    def _constraint_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        n_eq = sum(int(e.numel()) for e in self._equalities)
        n_ineq = sum(int(e.numel()) for e in self._inequalities)
        n_comp = sum(int(e.numel()) for e in self._complementarities)
        lower = np.concatenate([np.zeros(n_eq), np.zeros(n_ineq), np.full(n_comp, -self._relaxation)])
        upper = np.concatenate([np.zeros(n_eq), np.full(n_ineq, np.inf), np.full(n_comp, self._relaxation)])
        return lower, upper

    def unpack(self, x: np.ndarray) -> dict[str, np.ndarray]:
        """Split a stacked decision vector into named blocks."""
        x = np.asarray(x, dtype=float).reshape(-1)
        return {name: x[b.offset:b.offset + b.size].copy() for name, b in self._variables.items()}

    def pack(self, values: dict[str, np.ndarray] | None = None) -> np.ndarray:
        """Stack named block values, falling back to the registered initial values."""
        values = values or {}
        return np.concatenate([
            _as_values(values.get(name, block.values), block.size, name) for name, block in self._variables.items()
        ])

    def evaluate(self, values: dict[str, np.ndarray] | None = None) -> tuple[float, float]:
        """
        Objective and maximum constraint violation at the given point.

        Uses a residual function compiled separately from the solver, and
        includes variable bound violations.
        """
        x = self.pack(values)
        p = self._stack(self._parameters, 'values')
        objective, equalities, inequalities, products = self._residual_function()(x, p)
        violation = 0.0
        for array in (np.abs(np.asarray(equalities).reshape(-1)),
                      -np.asarray(inequalities).reshape(-1),
                      np.abs(np.asarray(products).reshape(-1)) - self._relaxation,
                      self._stack(self._variables, 'lower') - x,
                      x - self._stack(self._variables, 'upper')):
            if array.size:
                violation = max(violation, float(np.max(array)))
        return float(objective), violation

    def objective_gradient(self, values: dict[str, np.ndarray] | None = None) -> np.ndarray:
        """Automatic-differentiation gradient of the objective."""
        x, p = self._symbols(self._variables), self._symbols(self._parameters)
        gradient = ca.Function('gradient', [x, p], [ca.gradient(self._objective, x)])
        return np.asarray(gradient(self.pack(values), self._stack(self._parameters, 'values'))).reshape(-1)

    def constraint_values(self, values: dict[str, np.ndarray] | None = None) -> np.ndarray:
        """Stacked equality, inequality and complementarity expressions at the given point."""
        _, equalities, inequalities, products = self._residual_function()(
            self.pack(values), self._stack(self._parameters, 'values')
        )
        return np.concatenate([np.asarray(group).reshape(-1) for group in (equalities, inequalities, products)])

    def constraint_jacobian(self, values: dict[str, np.ndarray] | None = None) -> np.ndarray:
        """Automatic-differentiation Jacobian of constraint_values() in the decision variables."""
        x, p = self._symbols(self._variables), self._symbols(self._parameters)
        stacked = ca.vertcat(*self._constraint_groups())
        jacobian = ca.Function('jacobian', [x, p], [ca.jacobian(stacked, x)])
        return jacobian(self.pack(values), self._stack(self._parameters, 'values')).full()

    # --- solve ---

    def solve(self, options: SolverOptions | None = None) -> SolveReport:
        options = options or SolverOptions()
        solver = self._solver(options)
        lower_g, upper_g = self._constraint_bounds()
        lower_x = self._stack(self._variables, 'lower')
        upper_x = self._stack(self._variables, 'upper')
        start = np.clip(self._stack(self._variables, 'values'), lower_x, upper_x)
        started = time.perf_counter()
        try:
            result = solver(
                x0=start, p=self._stack(self._parameters, 'values'),
                lbx=lower_x, ubx=upper_x, lbg=lower_g, ubg=upper_g,
            )
        except RuntimeError as error:
            logger.debug("%s: solver raised %s", self.name, error)
            return SolveReport(status='diverged', wall_time=time.perf_counter() - started, solver_status=str(error))
        wall_time = time.perf_counter() - started
        stats = solver.stats()
        raw_status = str(stats.get('return_status', 'unknown'))
        status: SolveStatus = _IPOPT_STATUS.get(raw_status, 'diverged')
        x = np.asarray(result['x']).reshape(-1)
        values = self.unpack(x)
        objective, violation = self.evaluate(values)
        if status in ('optimal', 'acceptable') and violation > options.feas_tol:
            logger.debug("%s: %s solution violates constraints by %.3g", self.name, status, violation)
            status = 'infeasible'
        iterations = int(stats.get('iter_count', 0))
        logger.debug("%s: %s (%s) in %d iterations, %.3fs", self.name, status, raw_status, iterations, wall_time)
        return SolveReport(
            status=status,
            values=values,
            objective=objective,
            max_violation=violation,
            iterations=iterations,
            wall_time=wall_time,
            solver_status=raw_status,
        )


def solve(program: Program, options: SolverOptions | None = None) -> SolveReport:
    """Solve a program once with its current parameters, bounds and initial values."""
    return program.solve(options)


def relax_and_resolve(
    program: Program,
    delta_schedule: Sequence[float],
    options: SolverOptions | None = None,
) -> SolveReport:
    """
    Solve with a decreasing complementarity relaxation, warm-starting each stage.

    Returns the report of the last stage, or of the first stage that fails.
    An empty schedule or a program without complementarities is a plain solve.
    """
    if not delta_schedule or not program.has_complementarities:
        return program.solve(options)
    report = SolveReport(status='diverged')
    for delta in delta_schedule:
        program.set_relaxation(delta)
        report = program.solve(options)
        if not report.success:
            logger.debug("%s: relaxation stage δ=%.1e ended %s", program.name, delta, report.status)
            return report
        for name, value in report.values.items():
            program.set_initial(name, value)
    return report
