from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from socvexify._config import get_tolerances


class VerdictStatus(Enum):
    INSIDE = "INSIDE"
    OUTSIDE = "OUTSIDE"
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class MembershipVerdict:
    """Result of a membership oracle: status plus the signed slack of the tightest constraint."""

    status: VerdictStatus
    margin: float

    @classmethod
    def from_margin(cls, margin: float, tol: float | None = None) -> MembershipVerdict:
        tol = get_tolerances().feasibility if tol is None else tol
        if abs(margin) <= tol:
            status = VerdictStatus.BOUNDARY
        elif margin > 0:
            status = VerdictStatus.INSIDE
        else:
            status = VerdictStatus.OUTSIDE
        return cls(status=status, margin=float(margin))

    @property
    def member(self) -> bool:
        """INSIDE and BOUNDARY both count as membership."""
        return self.status is not VerdictStatus.OUTSIDE


@dataclass(frozen=True)
class SupportPoint:
    index: int
    point: tuple[float, ...]
    weight: float
    value: float


@dataclass(frozen=True)
class EnvelopeCertificate:
    """Concave envelope value at a query point, with the Caratheodory support that attains it."""

    value: float
    support: tuple[SupportPoint, ...]
    query: tuple[float, ...]

    @property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.support])

    @property
    def points(self) -> np.ndarray:
        return np.array([s.point for s in self.support], dtype=float).reshape(
            len(self.support), len(self.query)
        )

    def violations(self, tol: float | None = None) -> list[str]:
        """List the certificate invariants that fail within tol."""
        tol = get_tolerances().equality if tol is None else tol
        messages = []
        weights = self.weights
        if len(self.support) > len(self.query) + 1:
            messages.append(
                f"support has {len(self.support)} points, more than n+1={len(self.query) + 1}"
            )
        if np.any(weights <= 0):
            messages.append("support weights have to be positive")
        if abs(weights.sum() - 1.0) > tol:
            messages.append(f"support weights sum to {weights.sum()}, not 1")
        if np.abs(weights @ self.points - np.array(self.query)).max(initial=0.0) > tol:
            messages.append("support does not reconstruct the query point")
        values = np.array([s.value for s in self.support])
        if abs(weights @ values - self.value) > tol * (1 + abs(self.value)):
            messages.append("support does not reconstruct the envelope value")
        return messages
