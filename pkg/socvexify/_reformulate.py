from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from socvexify._binary_domain import BinaryDomain
from socvexify._config import get_tolerances
from socvexify._conic_set import ConicSet
from socvexify._errors import SocvexifyError
from socvexify._linalg import cholesky, is_positive_definite, project_onto_colspace
from socvexify._norms import NormKind
from socvexify._rhs_function import SqrtQuadraticRhs, TableRhs

logger = logging.getLogger(__name__)


def _square(value, size: int) -> np.ndarray:
    matrix = np.array(value, dtype=float)
    if matrix.size == 0:
        return matrix.reshape(size, size)
    return np.atleast_2d(matrix)


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """g(x) = x'Px + r'x + s."""

    P: np.ndarray
    r: np.ndarray
    s: float

    def __post_init__(self):
        r = np.array(self.r, dtype=float).ravel()
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "P", _square(self.P, r.size))
        object.__setattr__(self, "s", float(self.s))

    @classmethod
    def constant(cls, value: float, n: int) -> QuadraticForm:
        return cls(P=np.zeros((n, n)), r=np.zeros(n), s=value)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float).ravel()
        return float(x @ self.P @ x + self.r @ x + self.s)


@dataclass(frozen=True, eq=False)
class QuadConstraint:
    """x'Qxx x + 2x'Qxy y + y'Qyy y + ax'x + ay'y <= g(x), with g a constant or a QuadraticForm."""

    Qxx: np.ndarray
    Qxy: np.ndarray
    Qyy: np.ndarray
    ax: np.ndarray
    ay: np.ndarray
    g: float | QuadraticForm

    def __post_init__(self):
        ax = np.array(self.ax, dtype=float).ravel()
        ay = np.array(self.ay, dtype=float).ravel()
        n, m = ax.size, ay.size
        object.__setattr__(self, "ax", ax)
        object.__setattr__(self, "ay", ay)
        object.__setattr__(self, "Qxx", _square(self.Qxx, n))
        object.__setattr__(self, "Qyy", _square(self.Qyy, m))
        object.__setattr__(
            self, "Qxy", np.array(self.Qxy, dtype=float).reshape(n, m)
        )
        if not isinstance(self.g, QuadraticForm):
            object.__setattr__(self, "g", QuadraticForm.constant(float(self.g), n))
        problems = self.violations()
        if problems:
            raise ReformulationError(f"Invalid quadratic constraint: {problems}")

    @property
    def n(self) -> int:
        return self.ax.size

    @property
    def m(self) -> int:
        return self.ay.size

    def violations(self) -> list[str]:
        messages = []
        n, m = self.n, self.m
        if self.Qxx.shape != (n, n) or self.Qyy.shape != (m, m):
            messages.append(f"blocks have shapes {self.Qxx.shape} and {self.Qyy.shape}")
        for name in ("Qxx", "Qyy"):
            block = getattr(self, name)
            if block.shape[0] == block.shape[1] and not np.allclose(block, block.T):
                messages.append(f"{name} is not symmetric")
        if self.g.P.shape != (n, n):
            messages.append(f"g has dimension {self.g.r.size}, expected {n}")
        return messages

    def lhs(self, x, y) -> float:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        return float(
            x @ self.Qxx @ x
            + 2 * x @ self.Qxy @ y
            + y @ self.Qyy @ y
            + self.ax @ x
            + self.ay @ y
        )

    def slack(self, x, y) -> float:
        """g(x) minus the left-hand side; nonnegative iff the constraint holds."""
        return self.g(x) - self.lhs(x, y)


@dataclass(frozen=True, eq=False)
class DrccConstraint:
    """Distributionally robust chance constraint  P(w'z <= c) >= 1 - alpha  over all
    distributions of w with mean mu and covariance Sigma, z = (x, y)."""

    mu_x: np.ndarray
    mu_y: np.ndarray
    Sigma_xx: np.ndarray
    Sigma_xy: np.ndarray
    Sigma_yy: np.ndarray
    c: float
    alpha: float

    def __post_init__(self):
        mu_x = np.array(self.mu_x, dtype=float).ravel()
        mu_y = np.array(self.mu_y, dtype=float).ravel()
        n, m = mu_x.size, mu_y.size
        object.__setattr__(self, "mu_x", mu_x)
        object.__setattr__(self, "mu_y", mu_y)
        object.__setattr__(self, "Sigma_xx", _square(self.Sigma_xx, n))
        object.__setattr__(self, "Sigma_yy", _square(self.Sigma_yy, m))
        object.__setattr__(
            self, "Sigma_xy", np.array(self.Sigma_xy, dtype=float).reshape(n, m)
        )
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not 0 < self.alpha < 1:
            raise ReformulationError(f"Risk level alpha has to be in (0, 1), got {self.alpha}.")
        if not np.isfinite(self.c):
            raise ReformulationError("Capacity c has to be finite.")

    @classmethod
    def from_joint(cls, mu, Sigma, c: float, alpha: float, n: int) -> DrccConstraint:
        """Split a joint mean / covariance over z = (x, y) after the first n coordinates."""
        mu = np.asarray(mu, dtype=float).ravel()
        Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
        return cls(
            mu_x=mu[:n],
            mu_y=mu[n:],
            Sigma_xx=Sigma[:n, :n],
            Sigma_xy=Sigma[:n, n:],
            Sigma_yy=Sigma[n:, n:],
            c=c,
            alpha=alpha,
        )

    @property
    def alpha_tilde(self) -> float:
        return (1 - self.alpha) / self.alpha

    @property
    def mu(self) -> np.ndarray:
        return np.concatenate([self.mu_x, self.mu_y])

    @property
    def Sigma(self) -> np.ndarray:
        return np.block([[self.Sigma_xx, self.Sigma_xy], [self.Sigma_xy.T, self.Sigma_yy]])

    def slack(self, x, y) -> float:
        """c - mu'z - sqrt(alpha_tilde z'Sigma z); nonnegative iff the SOC form holds."""
        z = np.concatenate([np.ravel(x), np.ravel(y)]).astype(float)
        variance = max(float(z @ self.Sigma @ z), 0.0)
        return self.c - float(self.mu @ z) - np.sqrt(self.alpha_tilde * variance)


@dataclass(frozen=True, eq=False)
class DrccReformulation:
    """Quadratic row z'Sigma~z + 2c mu'z <= c^2 and linear row mu'z <= c of one DRCC."""

    quad: QuadConstraint
    linear: np.ndarray
    rhs: float
    alpha_tilde: float
    sigma_tilde_yy_pd: bool

    def slacks(self, x, y) -> tuple[float, float]:
        z = np.concatenate([np.ravel(x), np.ravel(y)]).astype(float)
        return self.quad.slack(x, y), self.rhs - float(self.linear @ z)


@dataclass(frozen=True, eq=False)
class SocPieces:
    """A, B, d and f = sqrt(q) of the SOC form ||Ax + By + d||_2 <= f(x)."""

    A: np.ndarray
    B: np.ndarray
    d: np.ndarray
    f: SqrtQuadraticRhs

    def to_conic_set(self, domain: BinaryDomain) -> ConicSet:
        return ConicSet(domain=domain, A=self.A, B=self.B, d=self.d, f=self.f)

    def residual(self, x, y) -> float:
        """f(x)^2 - ||Ax + By + d||^2."""
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        vector = self.A @ x + self.B @ y + self.d
        return self.f.radicand(x) - float(vector @ vector)


@dataclass(frozen=True)
class NormalizationReport:
    kept: tuple[int, ...]
    dropped: tuple[int, ...]
    dropped_points: tuple[tuple[int, ...], ...]
    radicands: tuple[float, ...]
    perp_norm: float

    @property
    def assumption2_held(self) -> bool:
        return self.perp_norm <= get_tolerances().equality

    def to_dict(self) -> dict:
        return {
            "kept": list(self.kept),
            "dropped": list(self.dropped),
            "dropped_points": [list(p) for p in self.dropped_points],
            "radicands": list(self.radicands),
            "perp_norm": self.perp_norm,
        }


def normalize_assumption2(conic_set: ConicSet) -> tuple[ConicSet, NormalizationReport]:
    """Project A and d onto col(B) and move the removed part into the right-hand side.

    f'(x) = sqrt(f(x)^2 - ||A_perp x + d_perp||^2) on the points where the radicand
    is at least -tol; the other points are dropped from the domain. Only the
    2-norm allows this; other norms must already satisfy col(A), d in col(B)."""
    tolerances = get_tolerances()
    f_values = conic_set.f_values()
    A_bar, A_perp = project_onto_colspace(conic_set.B, conic_set.A)
    d_bar, d_perp = project_onto_colspace(conic_set.B, conic_set.d)
    scale = 1.0 + max(np.abs(conic_set.A).max(initial=0.0), np.abs(conic_set.d).max(initial=0.0))
    perp_norm = float(max(np.abs(A_perp).max(initial=0.0), np.abs(d_perp).max(initial=0.0)))
    already = perp_norm <= tolerances.equality * scale
    if conic_set.y_box is not None:
        logger.warning("normalizing a set with a y box; the hull characterization may fail")

    if already:
        residuals = np.zeros(conic_set.domain.size)
        A_new, d_new = conic_set.A, conic_set.d
    elif conic_set.norm is not NormKind.L2:
        raise NormalizationError(
            f"Norm {conic_set.norm.value} set does not satisfy col(A), d in col(B) "
            f"(distance {perp_norm:.3e}); only 2-norm sets can be normalized."
        )
    else:
        X = conic_set.domain.array
        residuals = np.sum((X @ A_perp.T + d_perp) ** 2, axis=1)
        A_new, d_new = A_bar, d_bar

    radicands = f_values**2 - residuals
    kept = [k for k in range(conic_set.domain.size) if radicands[k] >= -tolerances.feasibility]
    dropped = [k for k in range(conic_set.domain.size) if k not in kept]
    if not kept:
        raise EmptyDomainAfterRestriction(
            "No domain point satisfies f(x)^2 >= ||A_perp x + d_perp||^2."
        )
    if dropped:
        logger.warning("normalization dropped %d domain points: %s", len(dropped), dropped)
    if already:
        new_f = TableRhs(values=tuple(f_values[kept]))
    else:
        new_f = TableRhs(values=tuple(np.sqrt(np.maximum(radicands[kept], 0.0))))
    normalized = ConicSet(
        domain=conic_set.domain.restrict(kept),
        A=A_new,
        B=conic_set.B,
        d=d_new,
        f=new_f,
        norm=conic_set.norm,
        y_box=conic_set.y_box,
    )
    report = NormalizationReport(
        kept=tuple(kept),
        dropped=tuple(dropped),
        dropped_points=tuple(conic_set.domain.points[k] for k in dropped),
        radicands=tuple(float(r) for r in radicands),
        perp_norm=perp_norm,
    )
    return normalized, report


def quad_to_soc(q: QuadConstraint) -> SocPieces:
    """Rewrite a quadratic constraint with Qyy positive definite as ||Ax + By + d||_2 <= f(x).

    With Qyy = L L': B = L', A = L^-1 Qxy', d = L^-1 ay / 2 and
    f(x)^2 = g(x) + x'(A'A - Qxx)x + (2A'd - ax)'x + ||d||^2."""
    L = cholesky(q.Qyy)
    B = L.T
    if q.m:
        A = scipy.linalg.solve_triangular(L, q.Qxy.T, lower=True)
        d = scipy.linalg.solve_triangular(L, q.ay, lower=True) / 2
    else:
        A, d = np.zeros((0, q.n)), np.zeros(0)
    P = q.g.P + A.T @ A - q.Qxx
    P = (P + P.T) / 2
    r = q.g.r + 2 * A.T @ d - q.ax
    s = q.g.s + float(d @ d)
    return SocPieces(A=A, B=B, d=d, f=SqrtQuadraticRhs(P=P, r=r, s=s))


def drcc_to_quad(dr: DrccConstraint) -> DrccReformulation:
    """Quadratic and linear rows equivalent to  mu'z + sqrt(alpha_tilde z'Sigma z) <= c.

    Sigma~ = alpha_tilde Sigma - mu mu'; the quadratic row is z'Sigma~z + 2c mu'z <= c^2.
    The flag tells whether Sigma~yy is positive definite, which quad_to_soc needs."""
    alpha_tilde = dr.alpha_tilde
    Sxx = alpha_tilde * dr.Sigma_xx - np.outer(dr.mu_x, dr.mu_x)
    Sxy = alpha_tilde * dr.Sigma_xy - np.outer(dr.mu_x, dr.mu_y)
    Syy = alpha_tilde * dr.Sigma_yy - np.outer(dr.mu_y, dr.mu_y)
    quad = QuadConstraint(
        Qxx=Sxx,
        Qxy=Sxy,
        Qyy=Syy,
        ax=2 * dr.c * dr.mu_x,
        ay=2 * dr.c * dr.mu_y,
        g=dr.c**2,
    )
    positive = is_positive_definite(Syy)
    if not positive:
        logger.warning("Sigma~yy is not positive definite (alpha=%g)", dr.alpha)
    return DrccReformulation(
        quad=quad,
        linear=dr.mu.copy(),
        rhs=dr.c,
        alpha_tilde=alpha_tilde,
        sigma_tilde_yy_pd=positive,
    )


class ReformulationError(SocvexifyError):
    """Custom error for the reformulation functions."""

    pass


class NormalizationError(ReformulationError):
    """Custom error for a set the column-space normalization cannot handle."""

    pass


class EmptyDomainAfterRestriction(NormalizationError):
    """Custom error for a normalization that leaves no domain point."""

    pass
