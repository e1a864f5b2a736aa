from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError
from socvexify._lp_solver import LpProblem, _matrix, _vector
from socvexify._norms import NormKind
from socvexify._solve_result import (
    Sense,
    SolveResult,
    SolveStatus,
    bound_violation,
    row_violation,
)

logger = logging.getLogger(__name__)

MU_START = 1.0
MU_FACTOR = 0.2
MU_STOP = 1e-9
BOX_RADIUS = 1e6
NEWTON_CAP = 100
PHASE_ONE_TARGET = -1e-3
EQUILIBRATION_PASSES = 10


@dataclass(eq=False)
class SocRow:
    """Cone row  ||F v + g|| <= h'v + e  in the norm given by `norm`."""

    F: np.ndarray
    g: np.ndarray
    h: np.ndarray
    e: float
    norm: NormKind = NormKind.L2

    def __post_init__(self):
        self.h = np.array(self.h, dtype=float).ravel()
        self.F = _matrix(self.F, self.h.size)
        self.g = _vector(self.g, self.F.shape[0], 0.0)
        self.e = float(self.e)
        self.norm = NormKind(self.norm)

    def slack(self, v: np.ndarray) -> float:
        return float(self.h @ v + self.e - self.norm.of(self.F @ v + self.g))


@dataclass(eq=False)
class SocpProblem:
    """max|min c'v  subject to cone rows, A_ub v <= b_ub, A_eq v = b_eq and lb <= v <= ub."""

    c: np.ndarray
    sense: Sense = Sense.MAX
    cones: list[SocRow] = field(default_factory=list)
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
        for row in self.cones:
            if row.h.size != n or row.F.shape[1] != n:
                raise SocpSolverError(
                    f"Cone row has {row.h.size} columns, the problem has {n} variables."
                )

    @property
    def n(self) -> int:
        return self.c.size

    def violation(self, v: np.ndarray) -> float:
        cone_violation = max((-row.slack(v) for row in self.cones), default=0.0)
        return max(
            row_violation(self.A_ub, self.b_ub, v, equality=False),
            row_violation(self.A_eq, self.b_eq, v, equality=True),
            bound_violation(v, self.lb, self.ub),
            cone_violation,
            0.0,
        )


@dataclass(eq=False)
class _Barrier:
    """Log-barrier of  G w <= h,  ||F_j w + g_j||_2 <= a_j'w + b_j  for all cones j
    and the ball  ||w[:ball]||_2 <= radius  (no ball when ball == 0).

    Cones are padded to a common dimension so every evaluation is vectorized."""

    G: np.ndarray
    h: np.ndarray
    F: np.ndarray
    g: np.ndarray
    a: np.ndarray
    b: np.ndarray
    radius: float = np.inf
    ball: int = 0

    @property
    def parameter(self) -> int:
        return self.G.shape[0] + 2 * self.a.shape[0] + (2 if self.ball else 0)

    @classmethod
    def build(
        cls, G, h, cones: list[tuple], columns: int, radius: float = np.inf, ball: int = 0
    ) -> _Barrier:
        width = max((F.shape[0] for F, _, _, _ in cones), default=0)
        F_all = np.zeros((len(cones), width, columns))
        g_all = np.zeros((len(cones), width))
        a_all = np.zeros((len(cones), columns))
        b_all = np.zeros(len(cones))
        for j, (F, g, a, b) in enumerate(cones):
            F_all[j, : F.shape[0]] = F
            g_all[j, : F.shape[0]] = g
            a_all[j] = a
            b_all[j] = b
        return cls(G=G, h=h, F=F_all, g=g_all, a=a_all, b=b_all, radius=radius, ball=ball)

    def margins(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = self.h - self.G @ w
        u = self.F @ w + self.g
        sigma = self.a @ w + self.b
        return s, u, sigma

    def _ball_margin(self, w: np.ndarray) -> float:
        return float(self.radius**2 - w[: self.ball] @ w[: self.ball])

    def interior(self, w: np.ndarray) -> bool:
        s, u, sigma = self.margins(w)
        if np.any(s <= 0) or np.any(sigma <= 0):
            return False
        if self.ball and self._ball_margin(w) <= 0:
            return False
        return bool(np.all(sigma**2 - np.sum(u**2, axis=1) > 0))

    def change(self, w: np.ndarray, step: np.ndarray) -> float:
        """barrier(w + step) - barrier(w), inf when w + step is not interior.

        Every log ratio is taken from the increments of the margins."""
        s, u, sigma = self.margins(w)
        ds = -(self.G @ step)
        if np.any(s + ds <= 0):
            return np.inf
        total = -np.sum(np.log1p(ds / s))
        if self.b.size:
            du = self.F @ step
            dsigma = self.a @ step
            if np.any(sigma + dsigma <= 0):
                return np.inf
            D = sigma**2 - np.sum(u**2, axis=1)
            ratio = (dsigma * (2 * sigma + dsigma) - np.sum(du * (2 * u + du), axis=1)) / D
            if np.any(ratio <= -1):
                return np.inf
            total -= np.sum(np.log1p(ratio))
        if self.ball:
            r, dr = w[: self.ball], step[: self.ball]
            ratio = -float(dr @ (2 * r + dr)) / self._ball_margin(w)
            if ratio <= -1:
                return np.inf
            total -= np.log1p(ratio)
        return float(total)

    def derivatives(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s, u, sigma = self.margins(w)
        inverse_s = 1.0 / s
        gradient = self.G.T @ inverse_s
        hessian = (self.G.T * inverse_s**2) @ self.G
        if self.b.size:
            D = sigma**2 - np.sum(u**2, axis=1)
            direction = 2 * sigma[:, None] * self.a - 2 * np.matmul(u[:, None, :], self.F)[:, 0]
            scaled = direction / D[:, None]
            gradient = gradient - scaled.sum(axis=0)
            hessian = hessian + scaled.T @ scaled
            hessian -= 2 * (self.a.T * (1.0 / D)) @ self.a
            weighted = (self.F * np.sqrt(2.0 / D)[:, None, None]).reshape(-1, w.size)
            hessian += weighted.T @ weighted
        if self.ball:
            k = self.ball
            r = w[:k]
            D = self._ball_margin(w)
            gradient[:k] += 2 * r / D
            hessian[:k, :k] += 2 * np.eye(k) / D + 4 * np.outer(r, r) / D**2
        return gradient, hessian


def _newton_direction(hessian: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    regularized = hessian + 1e-12 * (1.0 + np.abs(np.diag(hessian)).max(initial=0.0)) * np.eye(
        hessian.shape[0]
    )
    try:
        return -scipy.linalg.solve(regularized, gradient, assume_a="pos")
    except (np.linalg.LinAlgError, ValueError):
        return -np.linalg.lstsq(regularized, gradient, rcond=None)[0]


def _center(
    barrier: _Barrier, c: np.ndarray, w: np.ndarray, mu: float, on_step=None
) -> tuple[np.ndarray, int, float, bool]:
    """Damped Newton on  c'w / mu + barrier(w)  from an interior w.

    Returns the new point, the Newton steps taken, the last Newton decrement and
    whether the decrement dropped below its tolerance."""
    decrement = np.inf
    for step in range(NEWTON_CAP):
        gradient, hessian = barrier.derivatives(w)
        gradient = gradient + c / mu
        direction = _newton_direction(hessian, gradient)
        decrement = float(-gradient @ direction)
        if decrement / 2 <= 1e-10:
            return w, step, decrement, True
        slope = float(c @ direction) / mu
        size = 1.0
        while size > 1e-14:
            change = size * slope + barrier.change(w, size * direction)
            if change <= -0.25 * size * decrement:
                break
            size *= 0.5
        else:
            logger.debug("barrier line search stalled at mu=%.3e", mu)
            return w, step, decrement, decrement <= 1e-6
        w = w + size * direction
        if on_step is not None and on_step(w):
            return w, step + 1, decrement, True
    return w, NEWTON_CAP, decrement, False


def _barrier_path(
    barrier: _Barrier, c: np.ndarray, w: np.ndarray, stop=None, on_step=None
) -> tuple[np.ndarray, str, float, int, float]:
    """Follow the central path of  min c'w  from the interior point w.

    `stop(w, gap)` is consulted after every centering and `on_step(w)` after every
    Newton step; either may end the path early.
    Returns the point, an outcome tag, the last mu, the Newton steps and the
    last Newton decrement."""
    mu = MU_START
    steps = 0
    decrement = 0.0
    while True:
        w, used, decrement, centered = _center(barrier, c, w, mu, on_step=on_step)
        steps += used
        if on_step is not None and on_step(w):
            return w, "stopped", mu, steps, decrement
        if not centered:
            if mu < 1e-6:
                return w, "converged", mu, steps, decrement
            return w, "stalled", mu, steps, decrement
        gap = barrier.parameter * mu
        if stop is not None and stop(w, gap):
            return w, "stopped", mu, steps, decrement
        if mu < MU_STOP:
            return w, "converged", mu, steps, decrement
        mu *= MU_FACTOR


@dataclass(eq=False)
class _Reduced:
    """The problem in the coordinates w of  v = origin + basis @ w  (equalities eliminated)."""

    origin: np.ndarray
    basis: np.ndarray
    G: np.ndarray
    h: np.ndarray
    cones: list[tuple]
    c: np.ndarray
    constant: float
    # internal objective = constant + objective_scale * c'w
    objective_scale: float = 1.0


def _cone_rows(problem: SocpProblem):
    """Turn L1 / LINF cone rows into linear rows; L1 rows get auxiliary variables.

    Returns the extended variable count, the linear rows (A_ub first) with their
    right-hand sides and the remaining L2 cones, all over the extended variables."""
    n = problem.n
    rhs = [problem.b_ub]
    cones = []
    auxiliary = sum(row.F.shape[0] for row in problem.cones if row.norm is NormKind.L1)
    total = n + auxiliary

    def widen(matrix):
        return np.hstack([matrix, np.zeros((matrix.shape[0], total - matrix.shape[1]))])

    rows = [widen(problem.A_ub)]
    next_auxiliary = n
    for row in problem.cones:
        F = widen(row.F)
        a = np.concatenate([row.h, np.zeros(auxiliary)])
        k = row.F.shape[0]
        if k == 0:
            rows.append(-a[None, :])
            rhs.append(np.array([row.e]))
        elif row.norm is NormKind.L2:
            cones.append((F, row.g.copy(), a, row.e))
        elif row.norm is NormKind.LINF:
            # +-(F v + g) <= h'v + e
            rows.append(F - a)
            rhs.append(row.e - row.g)
            rows.append(-F - a)
            rhs.append(row.e + row.g)
        else:
            U = np.zeros((k, total))
            U[:, next_auxiliary : next_auxiliary + k] = np.eye(k)
            rows.append(F - U)
            rhs.append(-row.g)
            rows.append(-F - U)
            rhs.append(row.g)
            total_row = U.sum(axis=0) - a
            rows.append(total_row[None, :])
            rhs.append(np.array([row.e]))
            next_auxiliary += k
    return total, rows, rhs, cones


def _linearize(problem: SocpProblem):
    """Linear rows (bounds included), L2 cones, equality rows and objective over the
    extended variables, for the barrier."""
    n = problem.n
    total, rows, rhs, cones = _cone_rows(problem)
    identity = np.eye(total)[:n]
    finite_lb = np.isfinite(problem.lb)
    finite_ub = np.isfinite(problem.ub)
    rows.append(-identity[finite_lb])
    rhs.append(-problem.lb[finite_lb])
    rows.append(identity[finite_ub])
    rhs.append(problem.ub[finite_ub])
    G = np.vstack(rows) if rows else np.zeros((0, total))
    h = np.concatenate(rhs) if rhs else np.zeros(0)
    E = np.hstack([problem.A_eq, np.zeros((problem.A_eq.shape[0], total - n))])
    c = np.concatenate([problem.sense.sign * problem.c, np.zeros(total - n)])
    return total, G, h, cones, E, problem.b_eq, c


def as_lp(problem: SocpProblem) -> LpProblem:
    """The LP equivalent of an SOCP whose cone rows are all L1 or LINF.

    L1 rows add auxiliary free variables after the original ones, so the first
    `problem.n` entries of the LP solution are the SOCP solution."""
    total, rows, rhs, cones = _cone_rows(problem)
    if cones:
        raise SocpSolverError("Only L1 and LINF cone rows can be written as an LP.")
    extra = total - problem.n
    return LpProblem(
        c=np.concatenate([problem.c, np.zeros(extra)]),
        sense=problem.sense,
        A_ub=np.vstack(rows),
        b_ub=np.concatenate(rhs),
        A_eq=np.hstack([problem.A_eq, np.zeros((problem.A_eq.shape[0], extra))]),
        b_eq=problem.b_eq,
        lb=np.concatenate([problem.lb, np.full(extra, -np.inf)]),
        ub=np.concatenate([problem.ub, np.full(extra, np.inf)]),
    )


@functools.lru_cache(maxsize=16)
def _elimination(shape: tuple[int, int], data: bytes) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse and null-space basis of the equality matrix, shared by repeated solves."""
    E = np.frombuffer(data).reshape(shape)
    return np.linalg.pinv(E), scipy.linalg.null_space(E)


def _reduce(problem: SocpProblem) -> _Reduced | None:
    """Eliminate the equality rows; None when they are inconsistent."""
    tolerances = get_tolerances()
    total, G, h, cones, E, e, c = _linearize(problem)
    if E.shape[0] == 0:
        origin, basis = np.zeros(total), np.eye(total)
    else:
        inverse, basis = _elimination(E.shape, np.ascontiguousarray(E, dtype=float).tobytes())
        origin = inverse @ e
        if np.abs(E @ origin - e).max() > tolerances.equality * (1.0 + np.abs(e).max()):
            return None
    reduced_cones = [
        (F @ basis, g + F @ origin, basis.T @ a, b + a @ origin) for F, g, a, b in cones
    ]
    return _Reduced(
        origin=origin,
        basis=basis,
        G=G @ basis,
        h=h - G @ origin,
        cones=reduced_cones,
        c=basis.T @ c,
        constant=float(c @ origin),
    )


def _inverse_root(values: np.ndarray) -> np.ndarray:
    """1/sqrt(values) where values > 0, 1 elsewhere."""
    result = np.ones_like(values)
    positive = values > 0
    result[positive] = 1.0 / np.sqrt(values[positive])
    return result


def _equilibrate(reduced: _Reduced) -> _Reduced:
    """Ruiz equilibration of the rows and columns of the reduced problem.

    Every linear row and every cone (as a whole) ends with entries of largest
    magnitude 1. Columns are scaled into the basis, so v = origin + basis @ w
    still holds, and the objective is divided by its largest entry."""
    G, h = reduced.G.copy(), reduced.h.copy()
    cones = [(F.copy(), g.copy(), a.copy(), float(b)) for F, g, a, b in reduced.cones]
    column_scale = np.ones(G.shape[1])
    # round-off of the null-space products is dropped
    largest = max(
        [np.abs(G).max(initial=0.0)]
        + [max(np.abs(F).max(initial=0.0), np.abs(a).max(initial=0.0)) for F, _, a, _ in cones]
    )
    for matrix in [G] + [F for F, _, _, _ in cones] + [a for _, _, a, _ in cones]:
        matrix[np.abs(matrix) < 1e-13 * largest] = 0.0

    def scale_rows(power: float) -> None:
        nonlocal h
        rows = _inverse_root(np.abs(G).max(axis=1, initial=0.0)) ** power
        G[:] = G * rows[:, None]
        h = h * rows
        for j, (F, g, a, b) in enumerate(cones):
            largest = max(np.abs(F).max(initial=0.0), np.abs(a).max(initial=0.0))
            factor = float(_inverse_root(np.array([largest]))[0]) ** power
            cones[j] = (F * factor, g * factor, a * factor, b * factor)

    for _ in range(EQUILIBRATION_PASSES):
        scale_rows(1.0)
        largest = np.abs(G).max(axis=0, initial=0.0)
        for F, _, a, _ in cones:
            largest = np.maximum(largest, np.abs(F).max(axis=0, initial=0.0))
            largest = np.maximum(largest, np.abs(a))
        columns = _inverse_root(largest)
        G[:] = G * columns
        cones = [(F * columns, g, a * columns, b) for F, g, a, b in cones]
        column_scale *= columns
    scale_rows(2.0)

    c = reduced.c * column_scale
    objective_scale = float(np.abs(c).max(initial=0.0)) or 1.0
    return _Reduced(
        origin=reduced.origin,
        basis=reduced.basis * column_scale,
        G=G,
        h=h,
        cones=cones,
        c=c / objective_scale,
        constant=reduced.constant,
        objective_scale=objective_scale,
    )


def _ball_radius(reduced: _Reduced) -> float:
    """Radius of the ball |w| <= R that keeps the barrier bounded, sized from the data."""
    magnitudes = [1.0, np.abs(reduced.h).max(initial=0.0)]
    for _, g, _, b in reduced.cones:
        magnitudes += [np.abs(g).max(initial=0.0), abs(b)]
    return BOX_RADIUS * float(max(magnitudes))


def _phase_one(reduced: _Reduced, radius: float) -> tuple[np.ndarray, float, float, str, int]:
    """Find an interior point by minimizing t with every row relaxed by t (t >= -1).

    Returns the point, the relaxation t still needed there (negative means strictly
    interior), a lower bound on the smallest relaxation, the path outcome and the
    Newton steps used."""
    tolerances = get_tolerances()
    columns = reduced.basis.shape[1]
    w = np.zeros(columns)
    violation = [0.0]
    if reduced.h.size:
        violation.append(float((-reduced.h).max()))
    for F, g, a, b in reduced.cones:
        violation.append(float(np.linalg.norm(g) - b))
    t = max(violation) + 1.0
    G = np.vstack(
        [
            np.hstack([reduced.G, -np.ones((reduced.G.shape[0], 1))]),
            np.concatenate([np.zeros(columns), [-1.0]])[None, :],
        ]
    )
    h = np.concatenate([reduced.h, [1.0]])
    cones = [
        (np.hstack([F, np.zeros((F.shape[0], 1))]), g, np.concatenate([a, [1.0]]), b)
        for F, g, a, b in reduced.cones
    ]
    barrier = _Barrier.build(G, h, cones, columns + 1, radius=radius, ball=columns)
    objective = np.zeros(columns + 1)
    objective[-1] = 1.0

    def certified_infeasible(point, gap):
        return point[-1] - gap > tolerances.feasibility

    def interior_found(point):
        return point[-1] < PHASE_ONE_TARGET

    point, outcome, mu, steps, _ = _barrier_path(
        barrier,
        objective,
        np.concatenate([w, [t]]),
        stop=certified_infeasible,
        on_step=interior_found,
    )
    relaxation = float(point[-1])
    lower_bound = relaxation - barrier.parameter * mu
    logger.debug(
        "barrier phase 1 %s at t=%.3e (lower bound %.3e) after %d steps",
        outcome,
        relaxation,
        lower_bound,
        steps,
    )
    return point[:-1], relaxation, lower_bound, outcome, steps


def _phase_two(reduced: _Reduced, radius: float, shift: float) -> _Barrier:
    cones = [(F, g, a, b + shift) for F, g, a, b in reduced.cones]
    columns = reduced.basis.shape[1]
    return _Barrier.build(reduced.G, reduced.h + shift, cones, columns, radius=radius, ball=columns)


def _warm_start(problem: SocpProblem, reduced: _Reduced, start) -> np.ndarray | None:
    """Reduced coordinates of a user start point; None when they do not exist."""
    if start is None or reduced.origin.size != problem.n:
        return None
    start = np.asarray(start, dtype=float).ravel()
    if start.size != problem.n or not np.all(np.isfinite(start)):
        return None
    return np.linalg.lstsq(reduced.basis, start - reduced.origin, rcond=None)[0]


def solve_socp(problem: SocpProblem, stop_band: float | None = None, start=None) -> SolveResult:
    """Solve a dense SOCP with a primal log-barrier method.

    Equality rows are eliminated through a null-space basis, L1 / LINF cone rows
    are linearized, rows and columns are equilibrated and an interior start is
    found by a phase-1 problem. When the feasible set has an empty interior the
    rows are relaxed by the phase-1 value (at most the feasibility tolerance)
    before phase 2. A ball sized from the data bounds the barrier; an optimum
    near its boundary is reported as UNBOUNDED.

    With `stop_band` the path ends as soon as the objective is certified to be
    above +stop_band or below -stop_band; the returned value then only carries
    the sign information. `start` may give a point strictly inside every row;
    phase 1 is skipped when it is (it is projected onto the equality rows)."""
    tolerances = get_tolerances()
    reduced = _reduce(problem)
    if reduced is None:
        logger.debug("SOCP equality rows are inconsistent")
        return SolveResult(status=SolveStatus.INFEASIBLE)
    columns = reduced.basis.shape[1]
    if columns == 0:
        v = reduced.origin[: problem.n]
        violation = problem.violation(v)
        if violation > tolerances.feasibility:
            return SolveResult(status=SolveStatus.INFEASIBLE, residuals={"primal": violation})
        return SolveResult(
            status=SolveStatus.OPTIMAL,
            value=float(problem.c @ v),
            x=v,
            residuals={"primal": violation, "gap": 0.0, "decrement": 0.0},
        )

    reduced = _equilibrate(reduced)
    radius = _ball_radius(reduced)
    steps = 0
    barrier = _phase_two(reduced, radius, 0.0)
    initial = _warm_start(problem, reduced, start)
    if initial is None or not barrier.interior(initial):
        if start is not None:
            logger.debug("SOCP start point is not interior, running phase 1")
        initial, relaxation, lower_bound, outcome, steps = _phase_one(reduced, radius)
        if outcome == "stalled" and relaxation >= 0:
            return SolveResult(status=SolveStatus.NUMERICAL_LIMIT, iterations=steps)
        if lower_bound > tolerances.feasibility or relaxation > tolerances.feasibility:
            return SolveResult(status=SolveStatus.INFEASIBLE, iterations=steps)
        shift = 0.0
        if relaxation >= 0:
            shift = relaxation + 1e-9
            logger.debug("SOCP interior is empty, relaxing rows by %.3e", shift)
        barrier = _phase_two(reduced, radius, shift)
        if not barrier.interior(initial):
            logger.debug("phase 1 point is not interior for phase 2")
            return SolveResult(status=SolveStatus.NUMERICAL_LIMIT, iterations=steps)

    stop = None
    if stop_band is not None:
        sign = problem.sense.sign

        def stop(point, gap):
            internal = reduced.constant + reduced.objective_scale * float(reduced.c @ point)
            # internal optimum lies in [internal - gap, internal]
            gap = reduced.objective_scale * gap
            low, high = sorted([sign * internal, sign * (internal - gap)])
            return low > stop_band or high < -stop_band

    w, outcome, mu, used, decrement = _barrier_path(barrier, reduced.c, initial, stop=stop)
    steps += used
    if outcome == "stalled":
        return SolveResult(status=SolveStatus.NUMERICAL_LIMIT, iterations=steps)
    if np.linalg.norm(w) > radius / 2:
        value = float(-problem.sense.sign * np.inf)
        return SolveResult(status=SolveStatus.UNBOUNDED, value=value, iterations=steps)
    v = (reduced.origin + reduced.basis @ w)[: problem.n]
    residuals = {
        "primal": problem.violation(v),
        "gap": reduced.objective_scale * barrier.parameter * mu,
        "decrement": decrement,
    }
    if outcome == "stopped":
        residuals["stopped_early"] = 1.0
    return SolveResult(
        status=SolveStatus.OPTIMAL,
        value=float(problem.c @ v),
        x=v,
        residuals=residuals,
        iterations=steps,
    )


class SocpSolverError(SocvexifyError):
    """Custom error for malformed second-order cone programs."""

    pass
