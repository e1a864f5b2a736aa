from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from socvexify._binary_domain import MAX_DIMENSION, BinaryDomain
from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError
from socvexify._linalg import NotPositiveDefinite, psd_factor
from socvexify._lp_solver import LpProblem, solve_lp
from socvexify._model_ir import (
    LinearConstraint,
    ModelIR,
    QuadraticConstraint,
    RotatedConeConstraint,
    SocConstraint,
)
from socvexify._socp_solver import SocpProblem, SocRow, solve_socp
from socvexify._solve_result import Sense, SolveResult, SolveStatus

logger = logging.getLogger(__name__)


@dataclass
class ModelSolution:
    """Solve outcome of a ModelIR together with the incumbent assignment by variable name."""

    result: SolveResult
    assignment: dict[str, float] | None = None
    explored: int = 0
    pruned: int = 0

    @property
    def value(self) -> float | None:
        return self.result.value

    @property
    def status(self) -> SolveStatus:
        return self.result.status


class _ContinuousPart:
    """The model with every integer variable fixed, an LP or an SOCP in the continuous variables."""

    def __init__(self, model: ModelIR, fixed: dict[str, float]):
        self.model = model
        self.fixed = fixed
        self.names = [v.name for v in model.variables if v.name not in fixed]
        self.position = {name: k for k, name in enumerate(self.names)}
        self.rows, self.rhs = [], []
        self.eq_rows, self.eq_rhs = [], []
        self.cones: list[SocRow] = []
        for constraint in model.linear:
            self._linear(constraint)
        for constraint in model.soc:
            self._soc(constraint)
        for constraint in model.quadratic:
            self._quadratic(constraint)
        for constraint in model.rotated:
            self._rotated(constraint)
        objective, self.objective_constant = self._split(model.objective.coeffs)
        self.objective_constant += model.objective.constant
        self.objective = objective

    def _split(self, coeffs: dict[str, float]) -> tuple[np.ndarray, float]:
        """Coefficient vector over the continuous variables plus the fixed contribution."""
        vector = np.zeros(len(self.names))
        constant = 0.0
        for name, c in coeffs.items():
            if name in self.fixed:
                constant += c * self.fixed[name]
            else:
                vector[self.position[name]] += c
        return vector, constant

    def _affine(self, expression) -> tuple[np.ndarray, float]:
        vector, constant = self._split(expression.coeffs)
        return vector, constant + expression.constant

    def _linear(self, constraint: LinearConstraint) -> None:
        vector, constant = self._split(constraint.coeffs)
        rhs = constraint.rhs - constant
        if constraint.sense == "==":
            self.eq_rows.append(vector)
            self.eq_rhs.append(rhs)
        elif constraint.sense == ">=":
            self.rows.append(-vector)
            self.rhs.append(-rhs)
        else:
            self.rows.append(vector)
            self.rhs.append(rhs)

    def _soc(self, constraint: SocConstraint) -> None:
        pieces = [self._affine(row) for row in constraint.rows]
        h, e = self._affine(constraint.rhs)
        F = np.array([vector for vector, _ in pieces]).reshape(len(pieces), len(self.names))
        g = np.array([constant for _, constant in pieces])
        self.cones.append(SocRow(F=F, g=g, h=h, e=e, norm=constraint.norm))

    def _quadratic(self, constraint: QuadraticConstraint) -> None:
        size = len(self.names)
        Q = np.zeros((size, size))
        linear, constant = self._split(constraint.linear)
        for i, j, c in constraint.terms:
            if i in self.fixed and j in self.fixed:
                constant += c * self.fixed[i] * self.fixed[j]
            elif i in self.fixed:
                linear[self.position[j]] += c * self.fixed[i]
            elif j in self.fixed:
                linear[self.position[i]] += c * self.fixed[j]
            elif i == j:
                Q[self.position[i], self.position[i]] += c
            else:
                Q[self.position[i], self.position[j]] += c / 2
                Q[self.position[j], self.position[i]] += c / 2
        rhs = constraint.rhs - constant
        if not np.any(Q):
            self.rows.append(linear)
            self.rhs.append(rhs)
            return
        try:
            factor = psd_factor(Q)
        except NotPositiveDefinite:
            raise NonConvexContinuousPart(
                f"Quadratic row {constraint.name} is not convex in the continuous variables."
            )
        # v'Qv <= a(v) with a = rhs - linear'v  <=>  ||(2 sqrt(k) F'v, a - k)|| <= a + k, k > 0
        k = max(1.0, abs(rhs))
        F = np.vstack([2 * np.sqrt(k) * factor.T, -linear[None, :]])
        g = np.concatenate([np.zeros(factor.shape[1]), [rhs - k]])
        self.cones.append(SocRow(F=F, g=g, h=-linear, e=rhs + k))

    def _rotated(self, constraint: RotatedConeConstraint) -> None:
        # ||lhs||^2 <= rhs  <=>  ||(2 sqrt(k) lhs, rhs - k)|| <= rhs + k, k > 0
        k = self._balance()
        pieces = [self._affine(row) for row in constraint.lhs]
        h, e = self._affine(constraint.rhs)
        F = np.array([vector for vector, _ in pieces]).reshape(len(pieces), len(self.names))
        g = np.array([constant for _, constant in pieces])
        self.cones.append(
            SocRow(
                F=np.vstack([2 * np.sqrt(k) * F, h[None, :]]),
                g=np.concatenate([2 * np.sqrt(k) * g, [e - k]]),
                h=h,
                e=e + k,
            )
        )

    def _balance(self) -> float:
        """Largest |rhs| of the linear rows so far, at least 1; the k of a hyperbolic row."""
        return float(max([1.0, *(abs(rhs) for rhs in self.rhs)]))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        variables = {v.name: v for v in self.model.variables}
        lower = np.array([variables[name].lower for name in self.names], dtype=float)
        upper = np.array([variables[name].upper for name in self.names], dtype=float)
        return lower, upper

    def objective_bound(self, sense: Sense) -> float:
        """Best objective value the box of the continuous variables allows (inf if unbounded)."""
        lower, upper = self.bounds()
        c = -self.objective if sense is Sense.MAX else self.objective
        with np.errstate(invalid="ignore"):
            best = np.where(c > 0, c * lower, np.where(c < 0, c * upper, 0.0))
        total = float(np.sum(best))
        if np.isnan(total):
            total = -np.inf
        if sense is Sense.MAX:
            return self.objective_constant - total
        return self.objective_constant + total

    def box_infeasible(self) -> bool:
        """True when some linear row cannot be met anywhere in the box."""
        if not self.rows:
            return False
        lower, upper = self.bounds()
        A = np.array(self.rows)
        with np.errstate(invalid="ignore"):
            smallest = np.where(A > 0, A * lower, np.where(A < 0, A * upper, 0.0))
        smallest = np.nan_to_num(smallest, nan=-np.inf).sum(axis=1)
        return bool(np.any(smallest > np.array(self.rhs) + get_tolerances().feasibility))

    def _check_fixed(self) -> SolveResult:
        """Every variable is fixed: the rows and cones are only checked at the assignment."""
        empty = np.zeros(0)
        violation = max(
            [
                0.0,
                *(-rhs for rhs in self.rhs),
                *(abs(rhs) for rhs in self.eq_rhs),
                *(-row.slack(empty) for row in self.cones),
            ]
        )
        residuals = {"primal": float(violation)}
        if violation > get_tolerances().feasibility:
            return SolveResult(status=SolveStatus.INFEASIBLE, residuals=residuals)
        return SolveResult(status=SolveStatus.OPTIMAL, value=0.0, x=empty, residuals=residuals)

    def solve(self, stop_band: float | None = None) -> SolveResult:
        """Optimum over the continuous variables; the value excludes objective_constant."""
        if not self.names:
            return self._check_fixed()
        lower, upper = self.bounds()
        size = len(self.names)
        arguments = dict(
            c=self.objective,
            sense=self.model.objective.sense,
            A_ub=np.array(self.rows).reshape(len(self.rows), size),
            b_ub=np.array(self.rhs),
            A_eq=np.array(self.eq_rows).reshape(len(self.eq_rows), size),
            b_eq=np.array(self.eq_rhs),
            lb=lower,
            ub=upper,
        )
        if self.cones:
            return solve_socp(SocpProblem(cones=self.cones, **arguments), stop_band=stop_band)
        return solve_lp(LpProblem(**arguments))


def _full_assignment(model: ModelIR, part: _ContinuousPart, x) -> dict[str, float]:
    assignment = dict(part.fixed)
    for name, value in zip(part.names, x):
        assignment[name] = float(value)
    return {v.name: assignment[v.name] for v in model.variables}


def _better(sense: Sense, value: float, incumbent: float | None) -> bool:
    if incumbent is None:
        return True
    return value > incumbent if sense is Sense.MAX else value < incumbent


def _dominated(sense: Sense, bound: float, incumbent: float | None) -> bool:
    """True when a fixing whose objective cannot pass `bound` cannot beat the incumbent."""
    if incumbent is None:
        return False
    margin = get_tolerances().feasibility * (1 + abs(incumbent))
    if sense is Sense.MAX:
        return bound <= incumbent + margin
    return bound >= incumbent - margin


def solve_bruteforce(model: ModelIR, domain: BinaryDomain | None = None) -> ModelSolution:
    """Exact optimum of a model whose integer variables are binary, by enumerating their values.

    The coordinates of the domain points follow the declaration order of the
    integer variables; without a domain the full cube is enumerated. The zero
    point is tried first, every other fixing is skipped when its box bound cannot
    beat the incumbent or a linear row cannot hold in the box.

    A fixing the continuous solver gives up on makes the result NUMERICAL_LIMIT
    unless its box bound cannot beat the final incumbent; the incumbent is then
    still returned as the best known point."""
    integers = model.integer_variables
    for variable in integers:
        if not variable.binary:
            raise BruteForceError(f"Integer variable {variable.name} is not binary.")
    if domain is None:
        if len(integers) > MAX_DIMENSION:
            raise BruteForceError(
                f"{len(integers)} binary variables exceed the enumeration cap {MAX_DIMENSION}."
            )
        if not integers:
            return solve_continuous(model)
        domain = BinaryDomain.full_cube(len(integers))
    if domain.n != len(integers):
        raise BruteForceError(
            f"Domain dimension {domain.n} does not match {len(integers)} binary variables."
        )

    order = sorted(range(domain.size), key=lambda k: (any(domain.points[k]), k))
    sense = model.objective.sense
    incumbent, best = None, None
    explored = pruned = 0
    # fixings the continuous solver gave up on, with their box bound
    limited: list[tuple[tuple, float]] = []
    for k in order:
        fixed = {v.name: float(value) for v, value in zip(integers, domain.points[k])}
        part = _ContinuousPart(model, fixed)
        if part.box_infeasible():
            pruned += 1
            continue
        bound = part.objective_bound(sense)
        if _dominated(sense, bound, incumbent):
            pruned += 1
            continue
        explored += 1
        result = part.solve()
        if result.status is SolveStatus.UNBOUNDED:
            logger.info("brute force: fixing %s is unbounded", domain.points[k])
            return ModelSolution(result=result, explored=explored, pruned=pruned)
        if result.status is SolveStatus.NUMERICAL_LIMIT:
            logger.warning("brute force: fixing %s hit the numerical limit", domain.points[k])
            limited.append((domain.points[k], bound))
            continue
        if result.status is not SolveStatus.OPTIMAL:
            continue
        value = result.value + part.objective_constant
        if _better(sense, value, incumbent):
            incumbent = value
            best = (part, result)

    logger.info(
        "brute force explored %d of %d fixings (%d pruned)", explored, domain.size, pruned
    )
    unresolved = [point for point, bound in limited if not _dominated(sense, bound, incumbent)]
    if best is None:
        status = SolveStatus.NUMERICAL_LIMIT if unresolved else SolveStatus.INFEASIBLE
        return ModelSolution(result=SolveResult(status=status), explored=explored, pruned=pruned)
    part, result = best
    assignment = _full_assignment(model, part, result.x)
    vector = np.array(list(assignment.values()))
    residuals = {**result.residuals, "primal": model.violation(vector)}
    status = SolveStatus.OPTIMAL
    if unresolved:
        # the incumbent is kept as the best known point but not certified
        logger.warning(
            "brute force: %d unsolved fixings could beat the incumbent %.9g",
            len(unresolved),
            incumbent,
        )
        status = SolveStatus.NUMERICAL_LIMIT
        residuals["unresolved_fixings"] = float(len(unresolved))
    final = SolveResult(
        status=status,
        value=float(incumbent),
        x=vector,
        dual_bound=None,
        residuals=residuals,
        iterations=result.iterations,
    )
    return ModelSolution(result=final, assignment=assignment, explored=explored, pruned=pruned)


def solve_continuous(model: ModelIR, relax_integrality: bool = False) -> ModelSolution:
    """Optimum of a model without integer variables (or of its continuous relaxation)."""
    if model.integer_variables and not relax_integrality:
        raise BruteForceError("Model has integer variables; use solve_bruteforce.")
    part = _ContinuousPart(model, {})
    result = part.solve()
    if result.status is not SolveStatus.OPTIMAL:
        return ModelSolution(result=result, explored=1)
    value = result.value + part.objective_constant
    assignment = _full_assignment(model, part, result.x)
    dual_bound = result.dual_bound
    if dual_bound is not None:
        dual_bound += part.objective_constant
    final = SolveResult(
        status=SolveStatus.OPTIMAL,
        value=float(value),
        x=np.array(list(assignment.values())),
        dual_bound=dual_bound,
        residuals=dict(result.residuals),
        iterations=result.iterations,
    )
    return ModelSolution(result=final, assignment=assignment, explored=1)


class BruteForceError(SocvexifyError):
    """Custom error for models the enumeration solver cannot handle."""

    pass


class NonConvexContinuousPart(BruteForceError):
    """Custom error for a quadratic row that is not convex once the binaries are fixed."""

    pass
