from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError
from socvexify._solve_result import (
    Sense,
    SolveResult,
    SolveStatus,
    bound_violation,
    row_violation,
)

logger = logging.getLogger(__name__)


def _matrix(value, columns: int) -> np.ndarray:
    if value is None:
        return np.zeros((0, columns))
    array = np.array(value, dtype=float)
    if columns == 0:
        return np.zeros((array.shape[0] if array.ndim == 2 else 0, 0))
    return np.atleast_2d(array).reshape(-1, columns)


def _vector(value, length: int, default: float) -> np.ndarray:
    if value is None:
        return np.full(length, default)
    return np.array(value, dtype=float).reshape(length)


@dataclass(eq=False)
class LpProblem:
    """Linear program  max|min c'x  s.t.  A_ub x <= b_ub, A_eq x = b_eq, lb <= x <= ub.

    Missing rows are empty; missing bounds are -inf / +inf."""

    c: np.ndarray
    sense: Sense = Sense.MAX
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.array(self.c, dtype=float).ravel()
        n = self.c.size
        self.sense = Sense.parse(self.sense)
        self.A_ub = _matrix(self.A_ub, n)
        self.b_ub = _vector(self.b_ub, self.A_ub.shape[0], 0.0)
        self.A_eq = _matrix(self.A_eq, n)
        self.b_eq = _vector(self.b_eq, self.A_eq.shape[0], 0.0)
        self.lb = _vector(self.lb, n, -np.inf)
        self.ub = _vector(self.ub, n, np.inf)
        data = (self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq)
        if not all(np.all(np.isfinite(a)) for a in data):
            raise LpSolverError("LP data has to be finite.")

    @property
    def n(self) -> int:
        return self.c.size

    def violation(self, x: np.ndarray) -> float:
        """Largest violation of any row or bound at x."""
        return max(
            row_violation(self.A_ub, self.b_ub, x, equality=False),
            row_violation(self.A_eq, self.b_eq, x, equality=True),
            bound_violation(x, self.lb, self.ub),
        )


@dataclass(eq=False)
class _StandardForm:
    """min cost'z  s.t.  A z = b, z >= 0, with x = shift + transform @ z[:structural]."""

    A: np.ndarray
    b: np.ndarray
    cost: np.ndarray
    shift: np.ndarray
    transform: np.ndarray
    structural: int
    # rows whose slack column can start in the basis
    slack_basis: dict[int, int]

    @classmethod
    def build(cls, problem: LpProblem) -> _StandardForm:
        n = problem.n
        shift = np.zeros(n)
        columns = []
        bound_rows = []
        for j in range(n):
            lower, upper = problem.lb[j], problem.ub[j]
            if np.isfinite(lower):
                shift[j] = lower
                columns.append((j, 1.0))
                if np.isfinite(upper):
                    bound_rows.append((len(columns) - 1, upper - lower))
            elif np.isfinite(upper):
                shift[j] = upper
                columns.append((j, -1.0))
            else:
                columns.append((j, 1.0))
                columns.append((j, -1.0))
        transform = np.zeros((n, len(columns)))
        for k, (j, sign) in enumerate(columns):
            transform[j, k] = sign
        structural = len(columns)

        G = problem.A_ub @ transform
        h = problem.b_ub - problem.A_ub @ shift
        if bound_rows:
            bounds = np.zeros((len(bound_rows), structural))
            for row, (k, width) in enumerate(bound_rows):
                bounds[row, k] = 1.0
            G = np.vstack([G, bounds])
            h = np.concatenate([h, [width for _, width in bound_rows]])
        E = problem.A_eq @ transform
        e = problem.b_eq - problem.A_eq @ shift

        inequalities, equalities = G.shape[0], E.shape[0]
        A = np.zeros((inequalities + equalities, structural + inequalities))
        A[:inequalities, :structural] = G
        A[:inequalities, structural:] = np.eye(inequalities)
        A[inequalities:, :structural] = E
        b = np.concatenate([h, e])
        slack_basis = {}
        for row in range(A.shape[0]):
            if b[row] < 0:
                A[row] *= -1
                b[row] *= -1
            elif row < inequalities:
                slack_basis[row] = structural + row
        cost = np.zeros(A.shape[1])
        cost[:structural] = transform.T @ (problem.sense.sign * problem.c)
        return cls(
            A=A,
            b=b,
            cost=cost,
            shift=shift,
            transform=transform,
            structural=structural,
            slack_basis=slack_basis,
        )

    def to_x(self, z: np.ndarray) -> np.ndarray:
        return self.shift + self.transform @ z[: self.structural]


def _pivot(tableau: np.ndarray, row: int, column: int) -> None:
    tableau[row] /= tableau[row, column]
    factors = tableau[:, column].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


def _simplex(
    tableau: np.ndarray, basis: list[int], columns: int, iteration_cap: int, tol: float
) -> tuple[str, int]:
    """Minimize over the tableau with Bland's rule.

    The last row holds the reduced costs and -objective, the last column the
    basic values. Only the first `columns` columns may enter the basis."""
    rows = tableau.shape[0] - 1
    for iteration in range(iteration_cap):
        reduced = tableau[-1, :columns]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return "optimal", iteration
        column = int(entering[0])
        coefficients = tableau[:rows, column]
        candidates = np.flatnonzero(coefficients > tol)
        if candidates.size == 0:
            return "unbounded", iteration
        ratios = tableau[candidates, -1] / coefficients[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + 1e-12 * (1.0 + abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(tableau, row, column)
        basis[row] = column
    return "limit", iteration_cap


def _reduced_cost_row(tableau: np.ndarray, basis: list[int], cost: np.ndarray) -> None:
    rows = tableau.shape[0] - 1
    tableau[-1, :] = 0.0
    tableau[-1, : cost.size] = cost
    for i in range(rows):
        if cost[basis[i]] != 0.0:
            tableau[-1] -= cost[basis[i]] * tableau[i]


def solve_lp(problem: LpProblem, iteration_cap: int | None = None) -> SolveResult:
    """Solve a dense LP with the two-phase simplex method (Bland's rule).

    The result carries the dual bound computed from the optimal basis, the
    duality gap and the primal and dual residuals. The iteration cap defaults to
    10 * (rows + columns) of the standard form, per phase."""
    tolerances = get_tolerances()
    sign = problem.sense.sign
    if np.any(problem.lb > problem.ub):
        logger.debug("LP has crossed bounds")
        return SolveResult(status=SolveStatus.INFEASIBLE)

    form = _StandardForm.build(problem)
    rows, columns = form.A.shape
    if iteration_cap is None:
        iteration_cap = 10 * (rows + columns)
    pivot_tol = tolerances.pivot

    # phase 1 with artificial columns on rows without a usable slack
    artificial_rows = [i for i in range(rows) if i not in form.slack_basis]
    tableau = np.zeros((rows + 1, columns + len(artificial_rows) + 1))
    tableau[:rows, :columns] = form.A
    tableau[:rows, -1] = form.b
    basis = [form.slack_basis.get(i, -1) for i in range(rows)]
    for k, i in enumerate(artificial_rows):
        tableau[i, columns + k] = 1.0
        basis[i] = columns + k
    phase_one_cost = np.zeros(columns + len(artificial_rows))
    phase_one_cost[columns:] = 1.0
    _reduced_cost_row(tableau, basis, phase_one_cost)
    iterations = 0
    if artificial_rows:
        outcome, used = _simplex(
            tableau, basis, tableau.shape[1] - 1, iteration_cap, pivot_tol
        )
        iterations += used
        if outcome == "limit":
            logger.debug("simplex phase 1 hit the iteration cap %d", iteration_cap)
            return SolveResult(status=SolveStatus.NUMERICAL_LIMIT, iterations=iterations)
        infeasibility = -tableau[-1, -1]
        scale = 1.0 + np.abs(form.b).max(initial=0.0)
        if infeasibility > tolerances.feasibility * scale:
            logger.debug("simplex phase 1 ended at %.3e, LP infeasible", infeasibility)
            return SolveResult(status=SolveStatus.INFEASIBLE, iterations=iterations)

    # drive remaining artificials out of the basis, dropping redundant rows
    redundant = []
    for i in range(rows):
        if basis[i] < columns:
            continue
        replacement = np.flatnonzero(np.abs(tableau[i, :columns]) > pivot_tol)
        if replacement.size:
            _pivot(tableau, i, int(replacement[0]))
            basis[i] = int(replacement[0])
        else:
            redundant.append(i)
    if redundant:
        logger.debug("simplex dropped %d redundant rows", len(redundant))
    kept = [i for i in range(rows) if i not in redundant]
    keep_columns = list(range(columns)) + [tableau.shape[1] - 1]
    tableau = tableau[np.ix_(kept + [rows], keep_columns)]
    basis = [basis[i] for i in kept]

    _reduced_cost_row(tableau, basis, form.cost)
    outcome, used = _simplex(tableau, basis, columns, iteration_cap, pivot_tol)
    iterations += used
    logger.debug("simplex finished (%s) after %d pivots", outcome, iterations)
    if outcome == "limit":
        return SolveResult(status=SolveStatus.NUMERICAL_LIMIT, iterations=iterations)
    if outcome == "unbounded":
        return SolveResult(
            status=SolveStatus.UNBOUNDED,
            value=float(-sign * np.inf),
            iterations=iterations,
        )

    z = np.zeros(columns)
    z[basis] = np.maximum(tableau[:-1, -1], 0.0)
    x = form.to_x(z)
    value = float(problem.c @ x)

    A_kept, b_kept = form.A[kept], form.b[kept]
    constant = sign * float(problem.c @ form.shift)
    if basis:
        B = A_kept[:, basis]
        try:
            y = np.linalg.solve(B.T, form.cost[basis])
        except np.linalg.LinAlgError:
            y = np.linalg.lstsq(B.T, form.cost[basis], rcond=None)[0]
        dual_min = float(b_kept @ y) + constant
        dual_residual = float(max((A_kept.T @ y - form.cost).max(), 0.0))
    else:
        dual_min = constant
        dual_residual = float(max((-form.cost).max(initial=0.0), 0.0))
    dual_bound = sign * dual_min
    residuals = {
        "primal": problem.violation(x),
        "dual": dual_residual,
        "gap": abs(dual_bound - value),
    }
    return SolveResult(
        status=SolveStatus.OPTIMAL,
        value=value,
        x=x,
        dual_bound=float(dual_bound),
        residuals=residuals,
        iterations=iterations,
    )


class LpSolverError(SocvexifyError):
    """Custom error for malformed linear programs."""

    pass
