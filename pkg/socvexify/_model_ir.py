from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np

from socvexify._conic_set import _json_floats, _parse_floats
from socvexify._errors import SocvexifyError
from socvexify._norms import NormKind
from socvexify._solve_result import Sense

logger = logging.getLogger(__name__)

SENSES = ("<=", ">=", "==")
_LP_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def _number(value: float) -> str:
    return f"{(value or 0.0):.17g}"


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    integer: bool = False

    @property
    def binary(self) -> bool:
        return self.integer and self.lower == 0.0 and self.upper == 1.0

    def to_dict(self) -> dict:
        lower, upper = _json_floats(np.array([self.lower, self.upper]))
        return {"name": self.name, "lower": lower, "upper": upper, "integer": self.integer}

    @classmethod
    def from_dict(cls, data: dict) -> Variable:
        lower, upper = _parse_floats([data.get("lower", 0.0), data.get("upper", "inf")])
        return cls(
            name=data["name"], lower=lower, upper=upper, integer=bool(data.get("integer"))
        )


@dataclass(frozen=True)
class AffineExpr:
    """constant + sum of coefficient * variable."""

    coeffs: dict[str, float] = field(default_factory=dict)
    constant: float = 0.0

    def evaluate(self, values: dict[str, float]) -> float:
        return self.constant + sum(c * values[name] for name, c in self.coeffs.items())

    def to_dict(self) -> dict:
        return {"coeffs": dict(self.coeffs), "constant": self.constant}

    @classmethod
    def from_dict(cls, data: dict) -> AffineExpr:
        return cls(
            coeffs={k: float(v) for k, v in data.get("coeffs", {}).items()},
            constant=float(data.get("constant", 0.0)),
        )


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    coeffs: dict[str, float]
    sense: str
    rhs: float

    def violation(self, values: dict[str, float]) -> float:
        lhs = sum(c * values[name] for name, c in self.coeffs.items())
        if self.sense == "<=":
            return max(lhs - self.rhs, 0.0)
        if self.sense == ">=":
            return max(self.rhs - lhs, 0.0)
        return abs(lhs - self.rhs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "coeffs": dict(self.coeffs),
            "sense": self.sense,
            "rhs": self.rhs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> LinearConstraint:
        return cls(
            name=data["name"],
            coeffs={k: float(v) for k, v in data["coeffs"].items()},
            sense=data["sense"],
            rhs=float(data["rhs"]),
        )


@dataclass(frozen=True)
class SocConstraint:
    """||(rows_1, ..., rows_k)|| <= rhs, each entry an affine expression."""

    name: str
    rows: tuple[AffineExpr, ...]
    rhs: AffineExpr
    norm: NormKind = NormKind.L2

    def violation(self, values: dict[str, float]) -> float:
        vector = [row.evaluate(values) for row in self.rows]
        return max(self.norm.of(vector) - self.rhs.evaluate(values), 0.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rows": [row.to_dict() for row in self.rows],
            "rhs": self.rhs.to_dict(),
            "norm": self.norm.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SocConstraint:
        return cls(
            name=data["name"],
            rows=tuple(AffineExpr.from_dict(row) for row in data["rows"]),
            rhs=AffineExpr.from_dict(data["rhs"]),
            norm=NormKind(data.get("norm", "l2")),
        )


@dataclass(frozen=True)
class QuadraticConstraint:
    """sum of c * v_i * v_j over terms + linear part <= rhs."""

    name: str
    terms: tuple[tuple[str, str, float], ...]
    linear: dict[str, float]
    rhs: float

    @classmethod
    def from_matrix(cls, name: str, names: list[str], Q, linear, rhs: float):
        """Build v'Qv + linear'v <= rhs over the variables `names` (Q symmetric)."""
        Q = np.atleast_2d(np.array(Q, dtype=float))
        linear = np.array(linear, dtype=float).ravel()
        terms = []
        for i in range(len(names)):
            if Q[i, i] != 0:
                terms.append((names[i], names[i], float(Q[i, i])))
            for j in range(i + 1, len(names)):
                value = Q[i, j] + Q[j, i]
                if value != 0:
                    terms.append((names[i], names[j], float(value)))
        coeffs = {names[i]: float(v) for i, v in enumerate(linear) if v != 0}
        return cls(name=name, terms=tuple(terms), linear=coeffs, rhs=float(rhs))

    def lhs(self, values: dict[str, float]) -> float:
        quadratic = sum(c * values[i] * values[j] for i, j, c in self.terms)
        return quadratic + sum(c * values[name] for name, c in self.linear.items())

    def violation(self, values: dict[str, float]) -> float:
        return max(self.lhs(values) - self.rhs, 0.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "terms": [[i, j, c] for i, j, c in self.terms],
            "linear": dict(self.linear),
            "rhs": self.rhs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> QuadraticConstraint:
        return cls(
            name=data["name"],
            terms=tuple((i, j, float(c)) for i, j, c in data["terms"]),
            linear={k: float(v) for k, v in data.get("linear", {}).items()},
            rhs=float(data["rhs"]),
        )


@dataclass(frozen=True)
class RotatedConeConstraint:
    """||lhs||_2^2 <= rhs with an affine rhs (e.g. eta^2 <= tau)."""

    name: str
    lhs: tuple[AffineExpr, ...]
    rhs: AffineExpr

    def violation(self, values: dict[str, float]) -> float:
        square = sum(row.evaluate(values) ** 2 for row in self.lhs)
        return max(square - self.rhs.evaluate(values), 0.0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": [row.to_dict() for row in self.lhs],
            "rhs": self.rhs.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> RotatedConeConstraint:
        return cls(
            name=data["name"],
            lhs=tuple(AffineExpr.from_dict(row) for row in data["lhs"]),
            rhs=AffineExpr.from_dict(data["rhs"]),
        )


@dataclass(frozen=True)
class Objective:
    sense: Sense = Sense.MAX
    coeffs: dict[str, float] = field(default_factory=dict)
    constant: float = 0.0

    def evaluate(self, values: dict[str, float]) -> float:
        return self.constant + sum(c * values[name] for name, c in self.coeffs.items())

    def to_dict(self) -> dict:
        return {"sense": self.sense.value, "coeffs": dict(self.coeffs), "constant": self.constant}

    @classmethod
    def from_dict(cls, data: dict) -> Objective:
        return cls(
            sense=Sense.parse(data.get("sense", "max")),
            coeffs={k: float(v) for k, v in data.get("coeffs", {}).items()},
            constant=float(data.get("constant", 0.0)),
        )


@dataclass
class ModelIR:
    """Solver independent optimization model: variables, constraint rows and a linear objective."""

    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    linear: list[LinearConstraint] = field(default_factory=list)
    soc: list[SocConstraint] = field(default_factory=list)
    quadratic: list[QuadraticConstraint] = field(default_factory=list)
    rotated: list[RotatedConeConstraint] = field(default_factory=list)
    objective: Objective = field(default_factory=Objective)

    def add_variable(
        self, name: str, lower: float = 0.0, upper: float = math.inf, integer: bool = False
    ) -> str:
        self.variables.append(Variable(name=name, lower=lower, upper=upper, integer=integer))
        return name

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    @property
    def integer_variables(self) -> list[Variable]:
        return [v for v in self.variables if v.integer]

    @property
    def constraints(self) -> list:
        return [*self.linear, *self.soc, *self.quadratic, *self.rotated]

    def referenced_names(self, constraint) -> set[str]:
        if isinstance(constraint, LinearConstraint):
            return set(constraint.coeffs)
        if isinstance(constraint, QuadraticConstraint):
            return {i for i, _, _ in constraint.terms} | {
                j for _, j, _ in constraint.terms
            } | set(constraint.linear)
        if isinstance(constraint, SocConstraint):
            expressions = (*constraint.rows, constraint.rhs)
        else:
            expressions = (*constraint.lhs, constraint.rhs)
        return set().union(*(set(e.coeffs) for e in expressions))

    def validate(self) -> list[str]:
        """Describe every broken model invariant; empty when the model is valid."""
        messages = []
        declared = set()
        for variable in self.variables:
            if variable.name in declared:
                messages.append(f"variable {variable.name} is declared twice")
            declared.add(variable.name)
            if variable.lower > variable.upper:
                messages.append(f"variable {variable.name} has lower bound above upper bound")
        names = [c.name for c in self.constraints]
        for name in sorted({n for n in names if names.count(n) > 1}):
            messages.append(f"constraint name {name} is used twice")
        for constraint in self.constraints:
            missing = self.referenced_names(constraint) - declared
            if missing:
                messages.append(
                    f"constraint {constraint.name} references undeclared variables "
                    f"{sorted(missing)}"
                )
        for constraint in self.linear:
            if constraint.sense not in SENSES:
                messages.append(
                    f"constraint {constraint.name} has unknown sense {constraint.sense}"
                )
        missing = set(self.objective.coeffs) - declared
        if missing:
            messages.append(f"objective references undeclared variables {sorted(missing)}")
        return messages

    def assignment(self, vector) -> dict[str, float]:
        return {v.name: float(x) for v, x in zip(self.variables, vector)}

    def violation(self, vector) -> float:
        """Largest violation of a bound, integrality or constraint row at the given point."""
        values = self.assignment(vector)
        worst = 0.0
        for variable in self.variables:
            x = values[variable.name]
            worst = max(worst, variable.lower - x, x - variable.upper)
            if variable.integer:
                worst = max(worst, abs(x - round(x)))
        for constraint in self.constraints:
            worst = max(worst, constraint.violation(values))
        return worst

    def objective_value(self, vector) -> float:
        return self.objective.evaluate(self.assignment(vector))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "variables": [v.to_dict() for v in self.variables],
            "objective": self.objective.to_dict(),
            "linear": [c.to_dict() for c in self.linear],
            "soc": [c.to_dict() for c in self.soc],
            "quadratic": [c.to_dict() for c in self.quadratic],
            "rotated": [c.to_dict() for c in self.rotated],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ModelIR:
        try:
            return cls(
                name=data.get("name", "model"),
                variables=[Variable.from_dict(v) for v in data.get("variables", [])],
                linear=[LinearConstraint.from_dict(c) for c in data.get("linear", [])],
                soc=[SocConstraint.from_dict(c) for c in data.get("soc", [])],
                quadratic=[QuadraticConstraint.from_dict(c) for c in data.get("quadratic", [])],
                rotated=[RotatedConeConstraint.from_dict(c) for c in data.get("rotated", [])],
                objective=Objective.from_dict(data.get("objective", {})),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise ModelIRError(f"Invalid model description. {e}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> ModelIR:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelIRError(f"Model file is not valid JSON. {e}")
        return cls.from_dict(data)


def import_model(text: str) -> ModelIR:
    """Read a model written by export_model(model, "json")."""
    model = ModelIR.from_json(text)
    problems = model.validate()
    if problems:
        raise ModelIRError(f"Imported model is not valid: {problems}")
    return model


def export_model(model: ModelIR, format: str = "json") -> str:
    """Render the model as canonical JSON or as CPLEX-style LP text.

    In LP text the SOC rows become quadratic rows over auxiliary variables
    (u_i = row_i, t = rhs, t >= 0, sum u_i^2 - t^2 <= 0); L1 and LINF rows are
    written as linear rows."""
    problems = model.validate()
    if problems:
        raise ModelIRError(f"Cannot export an invalid model: {problems}")
    if format == "json":
        return model.to_json()
    if format == "lp_text":
        return _LpWriter(model).render()
    raise ModelIRError(f"Unknown export format {format}, expected 'json' or 'lp_text'.")


def _linear_terms(coeffs: dict[str, float]) -> str:
    parts = []
    for name, c in coeffs.items():
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {_number(abs(c))} {name}")
    if not parts:
        return ""
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _quadratic_terms(terms) -> str:
    parts = []
    for i, j, c in terms:
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        product = f"{i} ^ 2" if i == j else f"{i} * {j}"
        parts.append(f"{sign} {_number(abs(c))} {product}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


class _LpWriter:
    def __init__(self, model: ModelIR):
        self.model = model
        self.rows: list[str] = []
        self.extra_variables: list[Variable] = []

    def _check_name(self, name: str) -> None:
        if not _LP_NAME.match(name):
            raise UnrepresentableConstraint(f"Name {name!r} cannot be written in LP format.")

    def _row(self, name: str, linear: dict, quadratic=(), sense: str = "<=", rhs: float = 0.0):
        self._check_name(name)
        if not all(np.isfinite(list(linear.values()))) or not np.isfinite(rhs):
            raise UnrepresentableConstraint(f"Row {name} has non-finite coefficients.")
        body = _linear_terms(linear)
        quad = _quadratic_terms(quadratic)
        if quad:
            body = f"{body} + [ {quad} ]" if body else f"[ {quad} ]"
        if not body:
            body = f"0 {self.model.variables[0].name}" if self.model.variables else "0"
        operator = "=" if sense == "==" else sense
        self.rows.append(f" {name}: {body} {operator} {_number(rhs)}")

    def _auxiliary(self, name: str, expression: AffineExpr, lower: float = -math.inf) -> str:
        """New variable equal to the affine expression."""
        self._check_name(name)
        self.extra_variables.append(Variable(name=name, lower=lower, upper=math.inf))
        coeffs = {name: 1.0}
        for var, c in expression.coeffs.items():
            coeffs[var] = coeffs.get(var, 0.0) - c
        self._row(f"{name}_def", coeffs, sense="==", rhs=expression.constant)
        return name

    def _soc(self, constraint: SocConstraint) -> None:
        name = constraint.name
        if constraint.norm is NormKind.L2:
            squares = [
                self._auxiliary(f"{name}_u{i}", row) for i, row in enumerate(constraint.rows)
            ]
            t = self._auxiliary(f"{name}_t", constraint.rhs, lower=0.0)
            terms = [(u, u, 1.0) for u in squares] + [(t, t, -1.0)]
            self._row(name, {}, quadratic=terms)
            return
        # |row_i| <= a_i and combine: sum a_i <= rhs (L1) or a_i <= rhs (LINF)
        bounds = []
        for i, row in enumerate(constraint.rows):
            a = f"{name}_a{i}"
            self._check_name(a)
            self.extra_variables.append(Variable(name=a, lower=0.0))
            bounds.append(a)
            for side, sign in (("p", 1.0), ("m", -1.0)):
                coeffs = {var: sign * c for var, c in row.coeffs.items()}
                coeffs[a] = coeffs.get(a, 0.0) - 1.0
                self._row(f"{name}_{side}{i}", coeffs, rhs=-sign * row.constant)
        rhs_coeffs = {var: -c for var, c in constraint.rhs.coeffs.items()}
        if constraint.norm is NormKind.L1:
            coeffs = dict(rhs_coeffs)
            for a in bounds:
                coeffs[a] = coeffs.get(a, 0.0) + 1.0
            self._row(name, coeffs, rhs=constraint.rhs.constant)
        else:
            for i, a in enumerate(bounds):
                coeffs = dict(rhs_coeffs)
                coeffs[a] = coeffs.get(a, 0.0) + 1.0
                self._row(f"{name}_{i}", coeffs, rhs=constraint.rhs.constant)

    def _rotated(self, constraint: RotatedConeConstraint) -> None:
        squares = []
        for i, row in enumerate(constraint.lhs):
            direct = (
                len(row.coeffs) == 1
                and row.constant == 0.0
                and next(iter(row.coeffs.values())) == 1.0
            )
            if direct:
                squares.append(next(iter(row.coeffs)))
            else:
                squares.append(self._auxiliary(f"{constraint.name}_u{i}", row))
        coeffs = {var: -c for var, c in constraint.rhs.coeffs.items()}
        terms = [(u, u, 1.0) for u in squares]
        self._row(constraint.name, coeffs, quadratic=terms, rhs=constraint.rhs.constant)

    def render(self) -> str:
        model = self.model
        for variable in model.variables:
            self._check_name(variable.name)
        for constraint in model.linear:
            self._row(
                constraint.name, constraint.coeffs, sense=constraint.sense, rhs=constraint.rhs
            )
        for constraint in model.quadratic:
            self._row(
                constraint.name, constraint.linear, quadratic=constraint.terms, rhs=constraint.rhs
            )
        for constraint in model.soc:
            self._soc(constraint)
        for constraint in model.rotated:
            self._rotated(constraint)

        objective = _linear_terms(model.objective.coeffs) or "0"
        if model.objective.constant:
            objective += f" + {_number(model.objective.constant)}"
        lines = [
            f"\\ Model {model.name}",
            "Maximize" if model.objective.sense is Sense.MAX else "Minimize",
            f" obj: {objective}",
            "Subject To",
            *self.rows,
            "Bounds",
        ]
        for variable in [*model.variables, *self.extra_variables]:
            if variable.binary:
                continue
            lower, upper = variable.lower, variable.upper
            if lower == -math.inf and upper == math.inf:
                lines.append(f" {variable.name} free")
            elif upper == math.inf:
                lines.append(f" {variable.name} >= {_number(lower)}")
            elif lower == -math.inf:
                lines.append(f" -inf <= {variable.name} <= {_number(upper)}")
            else:
                lines.append(f" {_number(lower)} <= {variable.name} <= {_number(upper)}")
        binaries = [v.name for v in model.variables if v.binary]
        generals = [v.name for v in model.variables if v.integer and not v.binary]
        if binaries:
            lines.extend(["Binaries", *(f" {name}" for name in binaries)])
        if generals:
            lines.extend(["Generals", *(f" {name}" for name in generals)])
        lines.append("End")
        logger.debug(
            "exported model %s with %d rows and %d auxiliary variables",
            model.name,
            len(self.rows),
            len(self.extra_variables),
        )
        return "\n".join(lines) + "\n"


class ModelIRError(SocvexifyError):
    """Custom error for the ModelIR class."""

    pass


class UnrepresentableConstraint(ModelIRError):
    """Custom error for a row that cannot be written in the requested export format."""

    pass
