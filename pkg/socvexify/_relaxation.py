from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from socvexify._binary_domain import BinaryDomain
from socvexify._config import get_tolerances
from socvexify._envelope import concave_envelope, dirichlet_hull_points
from socvexify._errors import SocvexifyError

logger = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 200


def sqrt_envelope_value(domain: BinaryDomain, qvalues, query) -> float:
    """sqrt of the concave envelope of q at the query."""
    qvalues = np.asarray(qvalues, dtype=float).ravel()
    if np.any(qvalues < 0):
        raise RelaxationError("Values of q have to be nonnegative.")
    value = concave_envelope(domain, qvalues, query).value
    return float(np.sqrt(max(value, 0.0)))


def gap_bound(L: float, U: float) -> float:
    """(U - L)^2 / (4 (L + U)), with 0/0 read as 0."""
    if L < 0 or L > U:
        raise InvalidRange(f"Need 0 <= L <= U, got L={L}, U={U}.")
    if U == 0:
        return 0.0
    return (U - L) ** 2 / (4 * (L + U))


@dataclass
class Prop1Report:
    """sqrt(q_hat) - f_hat on a grid of hull points against the gap bound of [L, U]."""

    frame: pd.DataFrame
    L: float
    U: float
    bound: float
    max_gap: float
    argmax: tuple[float, ...] | None
    failures: list[str]

    @property
    def holds(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {
            "L": self.L,
            "U": self.U,
            "bound": self.bound,
            "max_gap": self.max_gap,
            "argmax": None if self.argmax is None else list(self.argmax),
            "holds": self.holds,
            "failures": list(self.failures),
        }


def default_grid(
    domain: BinaryDomain, rng: np.random.Generator, size: int = DEFAULT_GRID_SIZE
) -> np.ndarray:
    """size Dirichlet points of conv(X) followed by every domain point."""
    return np.vstack([dirichlet_hull_points(domain, size, rng), domain.array])


def verify_prop1(domain: BinaryDomain, fvalues, grid=None, rng=None) -> Prop1Report:
    """Check 0 <= sqrt(q_hat(x)) - f_hat(x) <= gap_bound(L, U) on every grid point, q = f^2.

    L and U are the exact minimum and maximum of f over the domain. Without a
    grid, default_grid is used with the given rng (seed 0 when missing)."""
    tol = get_tolerances().feasibility
    fvalues = np.asarray(fvalues, dtype=float).ravel()
    if np.any(fvalues < 0):
        raise RelaxationError("Values of f have to be nonnegative.")
    if grid is None:
        grid = default_grid(domain, rng if rng is not None else np.random.default_rng(0))
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    qvalues = fvalues**2
    L, U = float(fvalues.min()), float(fvalues.max())
    bound = gap_bound(L, U)

    rows, failures = [], []
    for query in grid:
        f_hat = concave_envelope(domain, fvalues, query).value
        sqrt_q_hat = sqrt_envelope_value(domain, qvalues, query)
        gap = sqrt_q_hat - f_hat
        if gap < -tol:
            failures.append(f"sqrt(q_hat) below f_hat by {-gap:.3e} at {query.tolist()}")
        elif gap > bound + tol:
            failures.append(f"gap {gap:.6g} above bound {bound:.6g} at {query.tolist()}")
        rows.append([*query, f_hat, sqrt_q_hat, gap, bound])

    columns = [f"x{i + 1}" for i in range(domain.n)] + ["f_hat", "sqrt_q_hat", "gap", "bound"]
    frame = pd.DataFrame(rows, columns=columns)
    if len(frame):
        best = int(frame["gap"].to_numpy().argmax())
        max_gap = float(frame["gap"].iloc[best])
        argmax = tuple(float(v) for v in grid[best])
    else:
        max_gap, argmax = 0.0, None
    logger.info("gap check on %d points: max gap %.6g, bound %.6g", len(frame), max_gap, bound)
    return Prop1Report(
        frame=frame, L=L, U=U, bound=bound, max_gap=max_gap, argmax=argmax, failures=failures
    )


def bhatia_davis_check(samples) -> bool:
    """True iff every (values, weights) sample satisfies variance <= (U - mean)(mean - L).

    L and U are the smallest and largest value of each sample."""
    tol = get_tolerances().feasibility
    for values, weights in samples:
        values = np.asarray(values, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        mean = float(weights @ values)
        variance = float(weights @ (values - mean) ** 2)
        L, U = values.min(), values.max()
        if variance > (U - mean) * (mean - L) + tol * (1 + U * U):
            logger.debug("Bhatia-Davis fails: variance %.6g, mean %.6g", variance, mean)
            return False
    return True


class RelaxationError(SocvexifyError):
    """Custom error for the relaxation checks."""

    pass


class InvalidRange(RelaxationError):
    """Custom error for a range [L, U] with L < 0 or L > U."""

    pass
