from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from socvexify._binary_domain import BinaryDomain
from socvexify._bruteforce import solve_continuous
from socvexify._config import DEFAULT_ALPHA, DEFAULT_SEED
from socvexify._errors import SocvexifyError
from socvexify._linalg import psd_factor, random_orthogonal
from socvexify._model_ir import (
    AffineExpr,
    LinearConstraint,
    ModelIR,
    Objective,
    QuadraticConstraint,
    RotatedConeConstraint,
    SocConstraint,
)
from socvexify._reformulate import DrccConstraint, drcc_to_quad, quad_to_soc
from socvexify._solve_result import Sense, SolveStatus

logger = logging.getLogger(__name__)

KP_TYPES = (1, 2, 3, 4)
KP_INDICES = range(1, 6)
BASE_RANGE = (1, 10000)
KP_WEIGHT_DIVISOR = 1000
KP_CONTINUOUS_PROFIT_DIVISOR = 5
MKP_WEIGHT_DIVISOR = 100
MKP_CAPACITY_DIVISOR = 10
CAPACITY_MULTIPLIER = 1.5
PSD_TOLERANCE = 1e-8
ENVELOPE_MAX_ITEMS = 12


@dataclass(frozen=True, eq=False)
class Resource:
    """One resource: mean weights mu (n+m), covariance sigma and capacity."""

    mu: np.ndarray
    sigma: np.ndarray
    capacity: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).ravel()
        object.__setattr__(self, "mu", mu)
        object.__setattr__(
            self, "sigma", np.array(self.sigma, dtype=float).reshape(mu.size, mu.size)
        )
        object.__setattr__(self, "capacity", float(self.capacity))

    def to_dict(self) -> dict:
        return {"mu": self.mu.tolist(), "sigma": self.sigma.tolist(), "capacity": self.capacity}

    @classmethod
    def from_dict(cls, data: dict) -> Resource:
        return cls(mu=data["mu"], sigma=data["sigma"], capacity=data["capacity"])


@dataclass(frozen=True, eq=False)
class KnapsackInstance:
    """Mixed-binary knapsack with one distributionally robust chance constraint per resource.

    The first n items are binary, the last m continuous in [0, 1]. `scale` keeps
    the unscaled integer data and the divisors that were applied to it."""

    n: int
    m: int
    profits_x: np.ndarray
    profits_y: np.ndarray
    resources: tuple[Resource, ...]
    alpha: float = DEFAULT_ALPHA
    type: int | None = None
    seed: int = DEFAULT_SEED
    index: int | None = None
    scale: dict = field(default_factory=dict)
    synthetic_base: bool = False

    def __post_init__(self):
        object.__setattr__(self, "profits_x", np.array(self.profits_x, dtype=float).ravel())
        object.__setattr__(self, "profits_y", np.array(self.profits_y, dtype=float).ravel())
        object.__setattr__(self, "resources", tuple(self.resources))

    @property
    def profits(self) -> np.ndarray:
        return np.concatenate([self.profits_x, self.profits_y])

    def drcc(self, j: int) -> DrccConstraint:
        resource = self.resources[j]
        return DrccConstraint.from_joint(
            resource.mu, resource.sigma, resource.capacity, self.alpha, self.n
        )

    def violations(self) -> list[str]:
        messages = []
        size = self.n + self.m
        if self.profits_x.size != self.n or self.profits_y.size != self.m:
            messages.append(f"profit vectors do not match n={self.n}, m={self.m}")
        if np.any(self.profits < 0):
            messages.append("profits have to be nonnegative")
        if not self.resources:
            messages.append("instance has no resource")
        if not 0 < self.alpha < 1:
            messages.append(f"alpha has to be in (0, 1), got {self.alpha}")
        for j, resource in enumerate(self.resources):
            if resource.mu.size != size:
                messages.append(
                    f"resource {j} has {resource.mu.size} mean weights, expected {size}"
                )
                continue
            if resource.capacity <= 0:
                messages.append(f"resource {j} has nonpositive capacity {resource.capacity}")
            sigma = resource.sigma
            scale = max(1.0, np.abs(sigma).max(initial=0.0))
            if not np.allclose(sigma, sigma.T, rtol=0, atol=PSD_TOLERANCE * scale):
                messages.append(f"covariance of resource {j} is not symmetric")
            elif np.linalg.eigvalsh(sigma).min() < -PSD_TOLERANCE * scale:
                messages.append(f"covariance of resource {j} is not positive semidefinite")
        return messages

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "type": self.type,
            "index": self.index,
            "seed": self.seed,
            "alpha": self.alpha,
            "profits_x": self.profits_x.tolist(),
            "profits_y": self.profits_y.tolist(),
            "resources": [r.to_dict() for r in self.resources],
            "scale": self.scale,
            "synthetic_base": self.synthetic_base,
        }

    @classmethod
    def from_dict(cls, data: dict) -> KnapsackInstance:
        try:
            instance = cls(
                n=int(data["n"]),
                m=int(data["m"]),
                profits_x=data["profits_x"],
                profits_y=data["profits_y"],
                resources=tuple(Resource.from_dict(r) for r in data["resources"]),
                alpha=float(data.get("alpha", DEFAULT_ALPHA)),
                type=data.get("type"),
                seed=int(data.get("seed", DEFAULT_SEED)),
                index=data.get("index"),
                scale=dict(data.get("scale", {})),
                synthetic_base=bool(data.get("synthetic_base", False)),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise KnapsackError(f"Invalid knapsack instance description. {e}")
        problems = instance.violations()
        if problems:
            raise KnapsackError(f"Invalid knapsack instance: {problems}")
        return instance

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> KnapsackInstance:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise KnapsackError(f"Instance file is not valid JSON. {e}")
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, file_name: str) -> KnapsackInstance:
        try:
            with open(file_name) as f:
                return cls.from_json(f.read())
        except FileNotFoundError:
            raise KnapsackError(f"File {file_name} not found!")


def _covariance(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sigma = U' diag(w)^2 U / 4 with a random orthogonal U."""
    U = random_orthogonal(weights.size, rng)
    sigma = U.T @ np.diag(weights**2) @ U / 4
    return (sigma + sigma.T) / 2


def _integers(rng: np.random.Generator, low: int, high: int, size: int) -> np.ndarray:
    return rng.integers(low, high + 1, size=size)


def _base_kp(kp_type: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    low, high = BASE_RANGE
    if kp_type == 1:
        weights = _integers(rng, low, high, size)
        profits = _integers(rng, low, high, size)
    elif kp_type == 2:
        weights = _integers(rng, low, high, size)
        noise = _integers(rng, -1000, 1000, size)
        profits = np.maximum(weights + noise, 1)
    elif kp_type == 3:
        weights = _integers(rng, low, high, size)
        profits = weights + 1000
    else:
        profits = _integers(rng, low, high, size)
        weights = profits + 1000
    return weights, profits


def generate_kp(
    n_total: int, kp_type: int, index: int, seed: int = DEFAULT_SEED, alpha: float = DEFAULT_ALPHA
) -> KnapsackInstance:
    """Single-resource instance of the given correlation type (1 uncorrelated, 2 weakly,
    3 strongly, 4 inverse strongly correlated) and capacity index 1..5.

    Integer data first, capacity sum(w) * index / 6, weights and capacity divided
    by 1000, the last n_total / 2 items continuous with profits divided by 5,
    mu = w, Sigma = U' diag(w)^2 U / 4 and finally the capacity times 3/2."""
    if kp_type not in KP_TYPES:
        raise InvalidType(f"Knapsack type has to be one of {KP_TYPES}, got {kp_type}.")
    if index not in KP_INDICES:
        raise KnapsackError(f"Instance index has to be in 1..5, got {index}.")
    if n_total < 2 or n_total % 2:
        raise KnapsackError(f"Number of items has to be even and at least 2, got {n_total}.")
    rng = np.random.default_rng([seed, kp_type, index, n_total])
    weights, profits = _base_kp(kp_type, n_total, rng)
    base_capacity = float(weights.sum()) * index / 6

    scaled_weights = weights / KP_WEIGHT_DIVISOR
    capacity = base_capacity / KP_WEIGHT_DIVISOR
    n = n_total // 2
    profits_x = profits[:n].astype(float)
    profits_y = profits[n:] / KP_CONTINUOUS_PROFIT_DIVISOR
    sigma = _covariance(scaled_weights, rng)
    capacity *= CAPACITY_MULTIPLIER

    logger.info("generated KP type %d, %d items, index %d, seed %d", kp_type, n_total, index, seed)
    return KnapsackInstance(
        n=n,
        m=n_total - n,
        profits_x=profits_x,
        profits_y=profits_y,
        resources=(Resource(mu=scaled_weights, sigma=sigma, capacity=capacity),),
        alpha=alpha,
        type=kp_type,
        seed=seed,
        index=index,
        scale={
            "base_weights": weights.tolist(),
            "base_profits": profits.tolist(),
            "base_capacity": base_capacity,
            "weight_divisor": KP_WEIGHT_DIVISOR,
            "capacity_divisor": KP_WEIGHT_DIVISOR,
            "continuous_profit_divisor": KP_CONTINUOUS_PROFIT_DIVISOR,
            "capacity_multiplier": CAPACITY_MULTIPLIER,
        },
    )


def generate_mkp(
    n: int, num_resources: int, seed: int = DEFAULT_SEED, alpha: float = DEFAULT_ALPHA
) -> KnapsackInstance:
    """Multi-resource instance on a synthetic base of n binary items.

    The base draws integer profits and per resource weights in 1..10000 with
    capacities sum(w) / 2. ceil(n / 2) continuous items get integer weights in
    [w_min / 2, w_max] and profits in [1, p_max / 10]; all weights are then
    divided by 100 and the capacities by 10."""
    if n < 2:
        raise KnapsackError(f"Need at least 2 discrete items, got {n}.")
    if num_resources < 1:
        raise KnapsackError(f"Need at least one resource, got {num_resources}.")
    rng = np.random.default_rng([seed, n, num_resources])
    low, high = BASE_RANGE
    m = math.ceil(n / 2)
    base_profits = _integers(rng, low, high, n)
    base_weights = [_integers(rng, low, high, n) for _ in range(num_resources)]
    base_capacities = [float(w.sum()) / 2 for w in base_weights]

    continuous_profits = _integers(rng, 1, max(int(base_profits.max()) // 10, 1), m)
    resources, continuous_weights = [], []
    for w, capacity in zip(base_weights, base_capacities):
        extra = _integers(rng, math.ceil(w.min() / 2), int(w.max()), m)
        continuous_weights.append(extra)
        weights = np.concatenate([w, extra]) / MKP_WEIGHT_DIVISOR
        resources.append(
            Resource(
                mu=weights,
                sigma=_covariance(weights, rng),
                capacity=capacity / MKP_CAPACITY_DIVISOR,
            )
        )
    logger.info("generated MKP with %d items and %d resources, seed %d", n, num_resources, seed)
    return KnapsackInstance(
        n=n,
        m=m,
        profits_x=base_profits.astype(float),
        profits_y=continuous_profits.astype(float),
        resources=tuple(resources),
        alpha=alpha,
        type=None,
        seed=seed,
        scale={
            "base_weights": [w.tolist() for w in base_weights],
            "base_profits": base_profits.tolist(),
            "base_capacities": base_capacities,
            "continuous_weights": [w.tolist() for w in continuous_weights],
            "continuous_profits": continuous_profits.tolist(),
            "weight_divisor": MKP_WEIGHT_DIVISOR,
            "capacity_divisor": MKP_CAPACITY_DIVISOR,
        },
        synthetic_base=True,
    )


def _item_names(instance: KnapsackInstance) -> tuple[list[str], list[str]]:
    return [f"x_{i}" for i in range(instance.n)], [f"y_{i}" for i in range(instance.m)]


def _base_model(instance: KnapsackInstance, name: str, relax: bool = False) -> ModelIR:
    """Item variables, the profit objective and the linear row mu'z <= c of every resource."""
    model = ModelIR(name=name)
    x_names, y_names = _item_names(instance)
    for x in x_names:
        model.add_variable(x, 0.0, 1.0, integer=not relax)
    for y in y_names:
        model.add_variable(y, 0.0, 1.0)
    model.objective = Objective(
        sense=Sense.MAX,
        coeffs={name: float(p) for name, p in zip(x_names + y_names, instance.profits)},
    )
    names = x_names + y_names
    for j, resource in enumerate(instance.resources):
        model.linear.append(
            LinearConstraint(
                name=f"mean_{j}",
                coeffs={v: float(c) for v, c in zip(names, resource.mu) if c != 0},
                sense="<=",
                rhs=resource.capacity,
            )
        )
    return model


def build_ccp(instance: KnapsackInstance) -> ModelIR:
    """Per resource the quadratic row z'Sigma~z + 2c mu'z <= c^2 and the linear row mu'z <= c."""
    model = _base_model(instance, "ccp")
    x_names, y_names = _item_names(instance)
    for j in range(len(instance.resources)):
        reformulation = drcc_to_quad(instance.drcc(j))
        quad = reformulation.quad
        Q = np.block([[quad.Qxx, quad.Qxy], [quad.Qxy.T, quad.Qyy]])
        model.quadratic.append(
            QuadraticConstraint.from_matrix(
                f"drcc_{j}",
                x_names + y_names,
                Q,
                np.concatenate([quad.ax, quad.ay]),
                quad.g.s,
            )
        )
    logger.info("built CCP model with %d resources", len(instance.resources))
    return model


def _affine(coefficients, names: list[str], constant: float = 0.0) -> AffineExpr:
    return AffineExpr(
        coeffs={v: float(c) for v, c in zip(names, coefficients) if c != 0},
        constant=float(constant),
    )


def build_soc(instance: KnapsackInstance, hypograph: bool = True) -> ModelIR:
    """Per resource ||Ax + By + d|| <= eta, eta^2 <= tau, tau <= q(x) and mu'z <= c.

    With hypograph=False the row tau <= q(x) is left out, for callers that bound
    tau in another way."""
    model = _base_model(instance, "soc")
    x_names, y_names = _item_names(instance)
    for j in range(len(instance.resources)):
        reformulation = drcc_to_quad(instance.drcc(j))
        if not reformulation.sigma_tilde_yy_pd:
            raise SigmaTildeNotPD(
                f"Sigma~yy of resource {j} is not positive definite (alpha={instance.alpha})."
            )
        pieces = quad_to_soc(reformulation.quad)
        eta = model.add_variable(f"eta_{j}", 0.0)
        tau = model.add_variable(f"tau_{j}", 0.0)
        rows = tuple(
            _affine(np.concatenate([pieces.A[i], pieces.B[i]]), x_names + y_names, pieces.d[i])
            for i in range(pieces.B.shape[0])
        )
        model.soc.append(SocConstraint(name=f"soc_{j}", rows=rows, rhs=AffineExpr({eta: 1.0})))
        model.rotated.append(
            RotatedConeConstraint(
                name=f"rot_{j}", lhs=(AffineExpr({eta: 1.0}),), rhs=AffineExpr({tau: 1.0})
            )
        )
        if hypograph:
            q = pieces.f
            # tau - x'Px - r'x <= s
            Q = np.zeros((instance.n + 1, instance.n + 1))
            Q[: instance.n, : instance.n] = -q.P
            model.quadratic.append(
                QuadraticConstraint.from_matrix(
                    f"hypo_{j}", x_names + [tau], Q, np.concatenate([-q.r, [1.0]]), q.s
                )
            )
    logger.info("built SOC model with %d resources", len(instance.resources))
    return model


@dataclass(frozen=True)
class RelaxationBounds:
    """Continuous relaxation bounds (max sense) of the CCP and the envelope tightened SOC model."""

    ccp: float | None
    soc_envelope: float | None
    q_concave: bool

    @property
    def dominates(self) -> bool | None:
        """True when the SOC bound is no larger than the CCP bound (within 1e-6)."""
        if self.ccp is None or self.soc_envelope is None:
            return None
        return self.soc_envelope <= self.ccp + 1e-6 * (1 + abs(self.ccp))

    def to_dict(self) -> dict:
        return {
            "ccp": self.ccp,
            "soc_envelope": self.soc_envelope,
            "q_concave": self.q_concave,
            "dominates": self.dominates,
        }


def ccp_relaxation(instance: KnapsackInstance) -> ModelIR:
    """mu'z + sqrt(alpha_tilde z'Sigma z) <= c as a cone over x in [0, 1]^n.

    This is the convex form of the CCP rows."""
    model = _base_model(instance, "ccp_relaxation", relax=True)
    x_names, y_names = _item_names(instance)
    names = x_names + y_names
    for j, resource in enumerate(instance.resources):
        dr = instance.drcc(j)
        F = psd_factor(dr.alpha_tilde * dr.Sigma)
        rows = tuple(_affine(F[:, k], names) for k in range(F.shape[1]))
        rhs = _affine(-resource.mu, names, resource.capacity)
        model.soc.append(SocConstraint(name=f"drcc_{j}", rows=rows, rhs=rhs))
    return model


def soc_envelope_relaxation(instance: KnapsackInstance) -> tuple[ModelIR, bool]:
    """SOC model over x in [0, 1]^n with tau <= q_hat(x), the concave envelope of q on {0,1}^n.

    q_hat is written through weights lam_j_k on the cube points. Also returns
    whether every q is concave, in which case q_hat = q."""
    if instance.n > ENVELOPE_MAX_ITEMS:
        raise KnapsackError(
            f"Envelope relaxation enumerates {{0,1}}^n and needs n <= {ENVELOPE_MAX_ITEMS}."
        )
    model = build_soc(instance, hypograph=False)
    model.name = "soc_envelope_relaxation"
    model.variables = [replace(v, integer=False) for v in model.variables]
    x_names, _ = _item_names(instance)
    cube = BinaryDomain.full_cube(instance.n)
    concave = True
    for j in range(len(instance.resources)):
        q = quad_to_soc(drcc_to_quad(instance.drcc(j)).quad).f
        P = q.P
        concave &= bool(np.linalg.eigvalsh(P).max() <= 1e-9 * max(1.0, np.abs(P).max()))
        values = q.radicands_on(cube)
        weights = [model.add_variable(f"lam_{j}_{k}", 0.0) for k in range(cube.size)]
        model.linear.append(
            LinearConstraint(
                name=f"hypo_{j}",
                coeffs={f"tau_{j}": 1.0, **{w: -float(v) for w, v in zip(weights, values)}},
                sense="<=",
                rhs=0.0,
            )
        )
        model.linear.append(
            LinearConstraint(
                name=f"simplex_{j}", coeffs={w: 1.0 for w in weights}, sense="==", rhs=1.0
            )
        )
        for i, x in enumerate(x_names):
            coeffs = {w: -float(point[i]) for w, point in zip(weights, cube.points) if point[i]}
            model.linear.append(
                LinearConstraint(
                    name=f"hull_{j}_{i}", coeffs={x: 1.0, **coeffs}, sense="==", rhs=0.0
                )
            )
    return model, concave


def relaxation_bounds(instance: KnapsackInstance) -> RelaxationBounds:
    """Solve both continuous relaxations; dominance is guaranteed when every q is concave."""
    ccp = solve_continuous(ccp_relaxation(instance))
    model, concave = soc_envelope_relaxation(instance)
    soc = solve_continuous(model)
    bounds = RelaxationBounds(
        ccp=ccp.value if ccp.status is SolveStatus.OPTIMAL else None,
        soc_envelope=soc.value if soc.status is SolveStatus.OPTIMAL else None,
        q_concave=concave,
    )
    logger.info("relaxation bounds: %s", bounds.to_dict())
    return bounds


class KnapsackError(SocvexifyError):
    """Custom error for knapsack instances and formulations."""

    pass


class InvalidType(KnapsackError):
    """Custom error for an unknown knapsack correlation type."""

    pass


class SigmaTildeNotPD(KnapsackError):
    """Custom error for a resource whose Sigma~yy is not positive definite."""

    pass
