from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class SolveStatus(Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    NUMERICAL_LIMIT = "NUMERICAL_LIMIT"


class Sense(Enum):
    MAX = "max"
    MIN = "min"

    @classmethod
    def parse(cls, value) -> Sense:
        return value if isinstance(value, Sense) else cls(str(value).lower())

    @property
    def sign(self) -> float:
        """Multiplier turning the objective into a minimization."""
        return -1.0 if self is Sense.MAX else 1.0


@dataclass
class SolveResult:
    """Outcome of a solve.

    residuals holds the certificate measures of the solver that produced it:
    `primal` (largest constraint violation of x), plus `dual` and `gap` for the
    simplex and `gap` and `decrement` for the barrier method."""

    status: SolveStatus
    value: float | None = None
    x: np.ndarray | None = None
    dual_bound: float | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "value": self.value,
            "x": None if self.x is None else [float(v) for v in self.x],
            "dual_bound": self.dual_bound,
            "residuals": dict(self.residuals),
            "iterations": self.iterations,
        }


def bound_violation(x: np.ndarray, lb: np.ndarray, ub: np.ndarray) -> float:
    with np.errstate(invalid="ignore"):
        below = np.where(np.isfinite(lb), lb - x, 0.0)
        above = np.where(np.isfinite(ub), x - ub, 0.0)
    return float(max(below.max(initial=0.0), above.max(initial=0.0), 0.0))


def row_violation(A: np.ndarray, b: np.ndarray, x: np.ndarray, equality: bool) -> float:
    if A.shape[0] == 0:
        return 0.0
    residual = A @ x - b
    if equality:
        return float(np.abs(residual).max())
    return float(max(residual.max(), 0.0))
