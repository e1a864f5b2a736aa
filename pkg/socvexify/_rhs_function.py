from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from socvexify._binary_domain import BinaryDomain
from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError


class RhsFunction(ABC):
    """Right-hand side f of the conic constraint, known on the points of a finite domain.

    Two variants exist: TableRhs (one value per domain point index) and
    SqrtQuadraticRhs (f(x) = sqrt(x'Px + r'x + s))."""

    @abstractmethod
    def radicands_on(self, domain: BinaryDomain) -> np.ndarray:
        """Values of f^2 at the domain points, before clamping."""

    def values_on(self, domain: BinaryDomain) -> np.ndarray:
        """Values of f at the domain points; tiny negative radicands are clamped to 0."""
        radicands = self.radicands_on(domain)
        clamp = get_tolerances().radicand_clamp
        bad = np.flatnonzero(radicands < -clamp)
        if bad.size:
            raise RhsFunctionError(
                f"Radicand of f is negative at domain point {int(bad[0])}: {radicands[bad[0]]}"
            )
        return np.sqrt(np.maximum(radicands, 0.0))

    @abstractmethod
    def violations(self, domain: BinaryDomain) -> list[str]:
        pass

    def evaluate(self, domain: BinaryDomain, x) -> float:
        """f at the domain point x."""
        index = domain.index_of(x)
        if index is None:
            raise RhsFunctionError(f"Point {np.ravel(x).tolist()} is not in the domain.")
        return float(self.values_on(domain)[index])

    @abstractmethod
    def to_dict(self) -> dict:
        pass

    @staticmethod
    def from_dict(data: dict) -> RhsFunction:
        """Read the {"table": [...]} or {"sqrt_quadratic": {P, r, s}} JSON form."""
        if "table" in data:
            return TableRhs(values=tuple(data["table"]))
        if "sqrt_quadratic" in data:
            sq = data["sqrt_quadratic"]
            return SqrtQuadraticRhs(P=sq["P"], r=sq["r"], s=sq["s"])
        raise RhsFunctionError(
            f"Unknown right-hand side function, expected 'table' or 'sqrt_quadratic': {list(data)}"
        )


@dataclass(frozen=True)
class TableRhs(RhsFunction):
    """f given by its value at every domain point (index aligned with the domain)."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def radicands_on(self, domain: BinaryDomain) -> np.ndarray:
        values = self._checked(domain)
        return values**2

    def values_on(self, domain: BinaryDomain) -> np.ndarray:
        values = self._checked(domain)
        if np.any(values < 0):
            raise RhsFunctionError("Table values of f have to be nonnegative.")
        return values

    def _checked(self, domain: BinaryDomain) -> np.ndarray:
        if len(self.values) != domain.size:
            raise RhsFunctionError(
                f"Table has {len(self.values)} values but the domain has {domain.size} points."
            )
        return np.array(self.values, dtype=float)

    def violations(self, domain: BinaryDomain) -> list[str]:
        messages = []
        if len(self.values) != domain.size:
            messages.append(
                f"table of f has {len(self.values)} values for {domain.size} domain points"
            )
        for idx, value in enumerate(self.values):
            if not np.isfinite(value):
                messages.append(f"table value of f at point {idx} is not finite")
            elif value < 0:
                messages.append(f"table value of f at point {idx} is negative: {value}")
        return messages

    def to_dict(self) -> dict:
        return {"table": list(self.values)}


@dataclass(frozen=True, eq=False)
class SqrtQuadraticRhs(RhsFunction):
    """f(x) = sqrt(x'Px + r'x + s) with P symmetric."""

    P: np.ndarray
    r: np.ndarray
    s: float

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        r = np.array(self.r, dtype=float).ravel()
        if P.size == 0:
            P = P.reshape(r.size, r.size)
        P = np.atleast_2d(P)
        for array in (P, r):
            array.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", float(self.s))

    def __eq__(self, other):
        if not isinstance(other, SqrtQuadraticRhs):
            return NotImplemented
        return (
            np.array_equal(self.P, other.P)
            and np.array_equal(self.r, other.r)
            and self.s == other.s
        )

    def radicand(self, x) -> float:
        x = np.asarray(x, dtype=float).ravel()
        return float(x @ self.P @ x + self.r @ x + self.s)

    def radicands_on(self, domain: BinaryDomain) -> np.ndarray:
        if self.P.shape != (domain.n, domain.n) or self.r.size != domain.n:
            raise RhsFunctionError(
                f"Quadratic of shape {self.P.shape} does not fit domain dimension {domain.n}."
            )
        X = domain.array
        return np.einsum("ki,ij,kj->k", X, self.P, X) + X @ self.r + self.s

    def violations(self, domain: BinaryDomain) -> list[str]:
        n = domain.n
        if self.P.shape != (n, n) or self.r.size != n:
            return [
                f"quadratic of f has P {self.P.shape} and r ({self.r.size},), "
                f"expected dimension {n}"
            ]
        messages = []
        if not np.allclose(self.P, self.P.T, rtol=0, atol=1e-12 * (1 + np.abs(self.P).max())):
            messages.append("matrix P of f is not symmetric")
        clamp = get_tolerances().radicand_clamp
        for idx, value in enumerate(self.radicands_on(domain)):
            if value < -clamp:
                messages.append(f"radicand of f is negative at domain point {idx}: {value}")
        return messages

    def to_dict(self) -> dict:
        return {
            "sqrt_quadratic": {"P": self.P.tolist(), "r": self.r.tolist(), "s": self.s}
        }


class RhsFunctionError(SocvexifyError):
    """Custom error for the RhsFunction classes."""

    pass
