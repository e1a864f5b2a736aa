from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from socvexify._errors import SocvexifyError

MAX_DIMENSION = 20


def _coordinate(value) -> int | float:
    value = float(value)
    return int(value) if value.is_integer() else value


@dataclass(frozen=True)
class BinaryDomain:
    """Finite set X of 0/1 points of dimension n, kept in the order given.

    The points are stored as tuples so the domain is immutable and hashable;
    `array` returns them as a (|X|, n) float matrix."""

    n: int
    points: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        points = tuple(tuple(_coordinate(v) for v in p) for p in self.points)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def full_cube(cls, n: int) -> BinaryDomain:
        """All 2^n points of {0,1}^n, first coordinate changing fastest."""
        if n < 1 or n > MAX_DIMENSION:
            raise BinaryDomainError(f"Dimension has to be in 1..{MAX_DIMENSION}, got {n}.")
        points = [tuple(reversed(p)) for p in itertools.product((0, 1), repeat=n)]
        return cls(n=n, points=tuple(points))

    @classmethod
    def from_points(cls, points) -> BinaryDomain:
        points = [tuple(p) for p in points]
        if not points:
            raise BinaryDomainError("A domain needs at least one point.")
        return cls(n=len(points[0]), points=tuple(points))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(self.size, self.n)

    def index_of(self, x, tol: float = 1e-9) -> int | None:
        """Index of the domain point equal to x (coordinate-wise within tol), None if absent."""
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n:
            return None
        hits = np.flatnonzero(np.all(np.abs(self.array - x) <= tol, axis=1))
        return int(hits[0]) if hits.size else None

    def restrict(self, indices) -> BinaryDomain:
        """Sub-domain made of the points at the given indices (order kept)."""
        return BinaryDomain(n=self.n, points=tuple(self.points[i] for i in indices))

    def violations(self) -> list[str]:
        """Describe every broken domain invariant; empty when the domain is valid."""
        messages = []
        if self.n < 1:
            messages.append(f"domain dimension has to be positive, got {self.n}")
        if self.n > MAX_DIMENSION:
            messages.append(
                f"domain dimension {self.n} exceeds the enumeration cap {MAX_DIMENSION}"
            )
        if not self.points:
            messages.append("domain has no points")
        if self.n >= 1 and len(self.points) > 2**self.n:
            messages.append(f"domain has more than 2^{self.n} points")
        seen = {}
        for idx, point in enumerate(self.points):
            if len(point) != self.n:
                messages.append(
                    f"domain point {idx} has length {len(point)}, expected {self.n}"
                )
                continue
            if any(v not in (0, 1) for v in point):
                messages.append(f"domain point {idx} has a coordinate outside {{0,1}}")
            if point in seen:
                messages.append(
                    f"domain points are not distinct: point {idx} duplicates point {seen[point]}"
                )
            else:
                seen[point] = idx
        return messages

    def to_list(self) -> list[list[int]]:
        return [list(p) for p in self.points]


class BinaryDomainError(SocvexifyError):
    """Custom error for the BinaryDomain class."""

    pass
