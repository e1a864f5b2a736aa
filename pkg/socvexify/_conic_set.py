from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from socvexify._binary_domain import BinaryDomain
from socvexify._errors import SocvexifyError
from socvexify._norms import NormKind
from socvexify._rhs_function import RhsFunction


def _frozen_matrix(value, rows: int | None = None) -> np.ndarray:
    matrix = np.array(value, dtype=float)
    if matrix.ndim == 1 and matrix.size == 0 and rows is not None:
        matrix = matrix.reshape(rows, 0)
    matrix = np.atleast_2d(matrix)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class YBox:
    """Per-coordinate bounds on y; infinite bounds are allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("lower", "upper"):
            array = np.array(getattr(self, name), dtype=float).ravel()
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __eq__(self, other):
        if not isinstance(other, YBox):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(
            self.upper, other.upper
        )

    def violation(self, y) -> float:
        """Total amount by which y leaves the box."""
        y = np.asarray(y, dtype=float).ravel()
        below = np.maximum(self.lower - y, 0.0)
        above = np.maximum(y - self.upper, 0.0)
        return float(below.sum() + above.sum())

    def to_dict(self) -> dict:
        return {"lower": _json_floats(self.lower), "upper": _json_floats(self.upper)}

    @classmethod
    def from_dict(cls, data: dict) -> YBox:
        return cls(lower=_parse_floats(data["lower"]), upper=_parse_floats(data["upper"]))


def _json_floats(values) -> list:
    """Infinite bounds are written as the strings 'inf' / '-inf'."""
    return [v if np.isfinite(v) else ("inf" if v > 0 else "-inf") for v in values.tolist()]


def _parse_floats(values) -> list[float]:
    return [float(v) for v in values]


@dataclass(frozen=True, eq=False)
class ConicSet:
    """The mixed-binary conic set Z = {(x, y) in X x R^m : ||Ax + By + d|| <= f(x)}.

    With y_box present the set additionally requires y inside the box; the
    convex hull characterization through the concave envelope is then not
    guaranteed (see `theorem_preconditions`)."""

    domain: BinaryDomain
    A: np.ndarray
    B: np.ndarray
    d: np.ndarray
    f: RhsFunction
    norm: NormKind = NormKind.L2
    y_box: YBox | None = None

    def __post_init__(self):
        d = np.array(self.d, dtype=float).ravel()
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "A", _frozen_matrix(self.A, rows=d.size))
        object.__setattr__(self, "B", _frozen_matrix(self.B, rows=d.size))
        object.__setattr__(self, "norm", NormKind(self.norm))

    def __eq__(self, other):
        if not isinstance(other, ConicSet):
            return NotImplemented
        return (
            self.domain == other.domain
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.d, other.d)
            and self.f == other.f
            and self.norm == other.norm
            and self.y_box == other.y_box
        )

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.d.size

    @property
    def theorem_preconditions(self) -> bool:
        """False when y is further constrained by a box."""
        return self.y_box is None

    def f_values(self) -> np.ndarray:
        """f evaluated at every domain point, in domain order."""
        return self.f.values_on(self.domain)

    def affine_part(self, x, y) -> np.ndarray:
        """The vector Ax + By + d."""
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        return self.A @ x + self.B @ y + self.d

    def with_f(self, f: RhsFunction, domain: BinaryDomain | None = None) -> ConicSet:
        return replace(self, f=f, domain=self.domain if domain is None else domain)

    def validate(self) -> list[str]:
        """Describe every broken invariant of the set; an empty list means the set is valid."""
        messages = self.domain.violations()
        p, n = self.d.size, self.domain.n
        if self.A.shape != (p, n):
            messages.append(f"dimension mismatch: A is {self.A.shape}, expected ({p}, {n})")
        if self.B.shape[0] != p:
            messages.append(f"dimension mismatch: B has {self.B.shape[0]} rows, expected {p}")
        for name in ("A", "B", "d"):
            if not np.all(np.isfinite(getattr(self, name))):
                messages.append(f"{name} contains non-finite entries")
        if not any("length" in message for message in messages):
            messages.extend(self.f.violations(self.domain))
        if self.y_box is not None:
            m = self.B.shape[1]
            if self.y_box.lower.size != m or self.y_box.upper.size != m:
                messages.append(f"y_box bounds do not have length m={m}")
            elif np.any(self.y_box.lower > self.y_box.upper):
                messages.append("y_box has a lower bound above its upper bound")
        return messages

    def to_dict(self) -> dict:
        data = {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "domain": self.domain.to_list(),
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "d": self.d.tolist(),
            "f": self.f.to_dict(),
            "norm": self.norm.value,
        }
        if self.y_box is not None:
            data["y_box"] = self.y_box.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> ConicSet:
        try:
            n, p = int(data["n"]), int(data["p"])
            domain = BinaryDomain(n=n, points=tuple(tuple(x) for x in data["domain"]))
            A = np.array(data["A"], dtype=float).reshape(p, n)
            B = np.array(data["B"], dtype=float).reshape(p, int(data["m"]))
            conic_set = cls(
                domain=domain,
                A=A,
                B=B,
                d=data["d"],
                f=RhsFunction.from_dict(data["f"]),
                norm=NormKind(data.get("norm", "l2")),
                y_box=YBox.from_dict(data["y_box"]) if data.get("y_box") else None,
            )
        except (KeyError, ValueError, TypeError) as e:
            raise ConicSetError(f"Invalid conic set description. {e}")
        return conic_set

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> ConicSet:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConicSetError(f"Conic set file is not valid JSON. {e}")
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, file_name: str) -> ConicSet:
        """Load a conic set from a JSON file."""
        try:
            with open(file_name) as f:
                return cls.from_json(f.read())
        except FileNotFoundError:
            raise ConicSetError(f"File {file_name} not found!")


def validate(conic_set: ConicSet) -> list[str]:
    """List the violated invariants of a conic set (empty when valid)."""
    return conic_set.validate()


class ConicSetError(SocvexifyError):
    """Custom error for the ConicSet class."""

    pass
