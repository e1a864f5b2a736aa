from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from socvexify._binary_domain import BinaryDomain
from socvexify._config import get_tolerances
from socvexify._conic_set import ConicSet, YBox
from socvexify._envelope import QueryOutsideHull, concave_envelope, dirichlet_weights
from socvexify._errors import SocvexifyError
from socvexify._linalg import column_compress
from socvexify._lp_solver import solve_lp
from socvexify._norms import NormKind
from socvexify._reformulate import normalize_assumption2
from socvexify._rhs_function import TableRhs
from socvexify._socp_solver import SocpProblem, SocRow, as_lp, solve_socp
from socvexify._solve_result import Sense, SolveStatus
from socvexify._verdicts import EnvelopeCertificate, MembershipVerdict, VerdictStatus

logger = logging.getLogger(__name__)

BOUNDARY_BAND = 10


def membership_Z(conic_set: ConicSet, x, y) -> MembershipVerdict:
    """Classify (x, y) against ||Ax + By + d|| <= f(x) (and the y box, when present)."""
    index = conic_set.domain.index_of(x)
    if index is None:
        raise PointNotInDomain(f"Point {np.ravel(x).tolist()} is not in the domain.")
    f = conic_set.f_values()[index]
    margin = f - conic_set.norm.of(conic_set.affine_part(x, y))
    if conic_set.y_box is not None:
        violation = conic_set.y_box.violation(y)
        margin -= violation
        # a point outside the box is never a member
        if violation > 0:
            margin = min(margin, -violation)
    return MembershipVerdict.from_margin(margin)


def envelope_membership(conic_set: ConicSet, x, y) -> tuple[MembershipVerdict, EnvelopeCertificate]:
    """membership_W together with the envelope certificate used for f_hat(x)."""
    certificate = concave_envelope(conic_set.domain, conic_set.f_values(), x)
    margin = certificate.value - conic_set.norm.of(conic_set.affine_part(x, y))
    return MembershipVerdict.from_margin(margin), certificate


def membership_W(conic_set: ConicSet, x, y) -> MembershipVerdict:
    """Classify (x, y) against ||Ax + By + d|| <= f_hat(x), f_hat the concave envelope of f.

    A y box is ignored here: W is defined by the envelope row alone."""
    if conic_set.y_box is not None:
        logger.warning("membership_W ignores the y box of the set")
    verdict, _ = envelope_membership(conic_set, x, y)
    return verdict


@dataclass(frozen=True, eq=False)
class _PerspectiveLayout:
    """Variable layout [lambda (K), z (K * r), t] of the perspective problem."""

    K: int
    r: int

    @property
    def size(self) -> int:
        return self.K * (self.r + 1) + 1

    def lam(self, k: int) -> int:
        return k

    def z(self, k: int) -> slice:
        start = self.K + k * self.r
        return slice(start, start + self.r)

    @property
    def t(self) -> int:
        return self.size - 1


def _compressed(conic_set: ConicSet, y) -> tuple[np.ndarray, np.ndarray]:
    """B_hat and the y target of the perspective rows: column compressed without a y box."""
    y = np.asarray(y, dtype=float).ravel()
    if conic_set.y_box is None:
        compression = column_compress(conic_set.B)
        return compression.B_hat, compression.basis_map @ y
    if np.linalg.matrix_rank(conic_set.B) < conic_set.B.shape[1]:
        raise PerspectiveError("A set with a y box needs B of full column rank.")
    return conic_set.B, y


def perspective_start(conic_set: ConicSet, y, weights) -> np.ndarray:
    """Interior point of the perspective problem from simplex weights with weights @ X = x.

    Every slice gets z^k = lambda_k (T)y and t clears the worst cone by 1."""
    weights = np.asarray(weights, dtype=float).ravel()
    B_hat, target = _compressed(conic_set, y)
    layout = _PerspectiveLayout(K=conic_set.domain.size, r=B_hat.shape[1])
    f = conic_set.f_values()
    start = np.zeros(layout.size)
    start[: layout.K] = weights
    excess = []
    for k, point in enumerate(conic_set.domain.array):
        z = weights[k] * target
        start[layout.z(k)] = z
        row = weights[k] * (conic_set.A @ point + conic_set.d) + B_hat @ z
        excess.append(conic_set.norm.of(row) - weights[k] * f[k])
    start[layout.t] = max(excess) + 1.0
    return start


def perspective_problem(conic_set: ConicSet, x, y) -> SocpProblem:
    """min t  over representations  x = sum lambda_k x^k,  (T)y = sum z^k  with
    ||lambda_k (A x^k + d) + B_hat z^k|| <= lambda_k f(x^k) + t  for every k, lambda in the simplex.

    t* <= 0 iff (x, y) lies in the closed perspective hull of the slices. B is
    column compressed (B = B_hat T); with a y box the full B is kept and the box
    enters in perspective form lambda_k lower <= z^k <= lambda_k upper."""
    x = np.asarray(x, dtype=float).ravel()
    domain = conic_set.domain
    f = conic_set.f_values()
    box = conic_set.y_box
    B_hat, target = _compressed(conic_set, y)
    layout = _PerspectiveLayout(K=domain.size, r=B_hat.shape[1])
    X = domain.array

    cones = []
    for k in range(layout.K):
        F = np.zeros((conic_set.p, layout.size))
        F[:, layout.lam(k)] = conic_set.A @ X[k] + conic_set.d
        F[:, layout.z(k)] = B_hat
        h = np.zeros(layout.size)
        h[layout.lam(k)] = f[k]
        h[layout.t] = 1.0
        cones.append(SocRow(F=F, g=np.zeros(conic_set.p), h=h, e=0.0, norm=conic_set.norm))

    equalities = np.zeros((domain.n + 1 + layout.r, layout.size))
    equalities[: domain.n, : layout.K] = X.T
    equalities[domain.n, : layout.K] = 1.0
    for k in range(layout.K):
        equalities[domain.n + 1 :, layout.z(k)] = np.eye(layout.r)
    rhs = np.concatenate([x, [1.0], target])

    rows, bounds = [], []
    if box is not None:
        for k in range(layout.K):
            for i in range(layout.r):
                if np.isfinite(box.upper[i]):
                    row = np.zeros(layout.size)
                    row[layout.z(k).start + i] = 1.0
                    row[layout.lam(k)] = -box.upper[i]
                    rows.append(row)
                    bounds.append(0.0)
                if np.isfinite(box.lower[i]):
                    row = np.zeros(layout.size)
                    row[layout.z(k).start + i] = -1.0
                    row[layout.lam(k)] = box.lower[i]
                    rows.append(row)
                    bounds.append(0.0)

    c = np.zeros(layout.size)
    c[layout.t] = 1.0
    lower = np.full(layout.size, -np.inf)
    lower[: layout.K] = 0.0
    return SocpProblem(
        c=c,
        sense=Sense.MIN,
        cones=cones,
        A_ub=np.array(rows).reshape(len(rows), layout.size),
        b_ub=np.array(bounds),
        A_eq=equalities,
        b_eq=rhs,
        lb=lower,
    )


def membership_conv_perspective(
    conic_set: ConicSet,
    x,
    y,
    method: str = "auto",
    stop_band: float | None = None,
    weights=None,
) -> MembershipVerdict:
    """Classify (x, y) against conv(Z) through the disjunctive perspective formulation.

    The margin is minus the smallest common relaxation t* of the slice cones.
    At a domain point lambda is forced onto that vertex, so the verdict is the
    one of membership_Z. L1 and LINF sets are solved as an LP unless
    method="barrier"; L2 sets always use the barrier. With stop_band the barrier
    stops once the sign of the margin is certain outside +-stop_band. Simplex weights
    with weights @ X = x give the barrier an interior start and skip its phase 1."""
    x = np.asarray(x, dtype=float).ravel()
    if method not in ("auto", "lp", "barrier"):
        raise PerspectiveError(f"Unknown method {method}, expected auto, lp or barrier.")
    if conic_set.domain.index_of(x) is not None:
        return membership_Z(conic_set, x, y)
    # raises QueryOutsideHull when x is not in conv(X)
    concave_envelope(conic_set.domain, np.zeros(conic_set.domain.size), x)
    problem = perspective_problem(conic_set, x, y)
    use_lp = conic_set.norm.lp_representable and method != "barrier"
    if method == "lp" and not conic_set.norm.lp_representable:
        raise PerspectiveError("The LP path needs an L1 or LINF set.")
    if use_lp:
        result = solve_lp(as_lp(problem))
    else:
        start = None if weights is None else perspective_start(conic_set, y, weights)
        result = solve_socp(problem, stop_band=stop_band, start=start)
    if result.status is SolveStatus.INFEASIBLE:
        # only a y box can make the problem infeasible once x is in conv(X)
        return MembershipVerdict(status=VerdictStatus.OUTSIDE, margin=-np.inf)
    if result.status is not SolveStatus.OPTIMAL:
        raise HullNumericalLimit(
            f"Perspective problem ended with status {result.status.value} at x={x.tolist()}."
        )
    return MembershipVerdict.from_margin(-result.value)


@dataclass(frozen=True)
class HullPoint:
    point_id: int
    x: tuple[float, ...]
    y: tuple[float, ...]
    W: MembershipVerdict | None
    hull: MembershipVerdict | None
    skipped: bool = False
    error: str | None = None

    @property
    def agrees(self) -> bool | None:
        if self.skipped or self.error is not None:
            return None
        return self.W.member == self.hull.member


@dataclass
class HullReport:
    """Outcome of comparing the envelope oracle with the perspective oracle on sampled points."""

    points: list[HullPoint] = field(default_factory=list)
    n: int = 0
    m: int = 0
    theorem_preconditions: bool = True
    certificate_failures: int = 0

    @property
    def agreements(self) -> int:
        return sum(1 for p in self.points if p.agrees is True)

    @property
    def disagreements(self) -> list[HullPoint]:
        return [p for p in self.points if p.agrees is False]

    @property
    def skipped(self) -> int:
        return sum(1 for p in self.points if p.skipped)

    @property
    def errors(self) -> list[HullPoint]:
        return [p for p in self.points if p.error is not None]

    @property
    def max_margin_difference(self) -> float:
        """Largest |W margin - hull margin| over the points where the oracles agree."""
        differences = [
            abs(p.W.margin - p.hull.margin)
            for p in self.points
            if p.agrees and np.isfinite(p.hull.margin)
        ]
        return max(differences, default=0.0)

    @property
    def confirmed(self) -> bool:
        return not self.disagreements and not self.errors and self.certificate_failures == 0

    def to_data_frame(self) -> pd.DataFrame:
        columns = (
            ["point_id"]
            + [f"x{i + 1}" for i in range(self.n)]
            + [f"y{i + 1}" for i in range(self.m)]
            + ["W_status", "hull_status", "W_margin", "hull_margin"]
        )
        rows = []
        for p in self.points:
            rows.append(
                [p.point_id, *p.x, *p.y]
                + [
                    p.W.status.value if p.W else "ERROR",
                    p.hull.status.value if p.hull else "ERROR",
                    p.W.margin if p.W else np.nan,
                    p.hull.margin if p.hull else np.nan,
                ]
            )
        return pd.DataFrame(rows, columns=columns)

    def summary(self) -> dict:
        return {
            "points": len(self.points),
            "agreements": self.agreements,
            "disagreements": len(self.disagreements),
            "skipped": self.skipped,
            "errors": len(self.errors),
            "certificate_failures": self.certificate_failures,
            "max_margin_difference": self.max_margin_difference,
            "theorem_preconditions": self.theorem_preconditions,
        }


def sampling_radius(conic_set: ConicSet) -> float:
    """Ymax = (max f_hat + ||d|| + ||A|| sqrt(n)) / sigma_min(B_hat).

    The envelope attains its maximum at a domain point, so max f_hat = max f."""
    f = conic_set.f_values()
    compression = column_compress(conic_set.B)
    if compression.rank == 0:
        return 1.0
    sigma_min = np.linalg.svd(compression.B_hat, compute_uv=False).min()
    A_norm = np.linalg.norm(conic_set.A, 2) if conic_set.A.size else 0.0
    numerator = f.max() + np.linalg.norm(conic_set.d) + A_norm * np.sqrt(conic_set.n)
    return float(max(numerator, 1e-3) / sigma_min)


def verify_hull_equivalence(
    conic_set: ConicSet,
    trials: int,
    rng: np.random.Generator,
    method: str = "auto",
) -> HullReport:
    """Sample points around W and compare membership_W with membership_conv_perspective.

    x is Dirichlet distributed over conv(X) and y uniform in [-Ymax, Ymax]^m.
    Points within 10 * tol of either boundary are skipped; solver failures are
    recorded per point."""
    tol = get_tolerances().feasibility
    band = BOUNDARY_BAND * tol
    if not conic_set.theorem_preconditions:
        logger.warning("set has a y box, hull equivalence is not expected to hold")
    report = HullReport(
        n=conic_set.n, m=conic_set.m, theorem_preconditions=conic_set.theorem_preconditions
    )
    radius = sampling_radius(conic_set)
    weights = dirichlet_weights(conic_set.domain, trials, rng)
    xs = weights @ conic_set.domain.array
    ys = rng.uniform(-radius, radius, size=(trials, conic_set.m))
    for point_id, (x, y) in enumerate(zip(xs, ys)):
        W = hull = None
        try:
            W, certificate = envelope_membership(conic_set, x, y)
            if certificate.violations():
                report.certificate_failures += 1
            hull = membership_conv_perspective(
                conic_set, x, y, method=method, stop_band=band, weights=weights[point_id]
            )
        except SocvexifyError as e:
            report.points.append(
                HullPoint(point_id, tuple(x), tuple(y), W, hull, error=str(e))
            )
            continue
        skipped = abs(W.margin) <= band or abs(hull.margin) <= band
        report.points.append(HullPoint(point_id, tuple(x), tuple(y), W, hull, skipped=skipped))
    logger.info(
        "hull check: %d agreements, %d disagreements, %d skipped, %d errors",
        report.agreements,
        len(report.disagreements),
        report.skipped,
        len(report.errors),
    )
    return report


def example1_fixture() -> ConicSet:
    """X = {0, 1}, A = (1, 0)', B = (0, 1)', d = 0 and constant f = sqrt(2).

    col(A) is not inside col(B), so the envelope of f alone overstates conv(Z)."""
    root2 = float(np.sqrt(2.0))
    return ConicSet(
        domain=BinaryDomain.full_cube(1),
        A=np.array([[1.0], [0.0]]),
        B=np.array([[0.0], [1.0]]),
        d=np.zeros(2),
        f=TableRhs(values=(root2, root2)),
    )


def example2_fixture() -> ConicSet:
    """X = {0, 1}, A = (3, 3)', B = I, d = (1, -1), f = sqrt(2) and y >= 0.

    The nonnegativity of y makes conv(Z) strictly smaller than W."""
    root2 = float(np.sqrt(2.0))
    return ConicSet(
        domain=BinaryDomain.full_cube(1),
        A=np.array([[3.0], [3.0]]),
        B=np.eye(2),
        d=np.array([1.0, -1.0]),
        f=TableRhs(values=(root2, root2)),
        y_box=YBox(lower=np.zeros(2), upper=np.full(2, np.inf)),
    )


def random_hull_instance(
    n: int, m: int, p: int, norm: NormKind, rng: np.random.Generator
) -> ConicSet:
    """Random set over the full cube {0,1}^n that satisfies col(A), d in col(B).

    One set in four gets a rank deficient B. 2-norm sets are drawn freely and
    normalized; other norms get A = B M and d = B v directly. f is kept above
    ||Ax + d|| so normalization never drops a point."""
    norm = NormKind(norm)
    domain = BinaryDomain.full_cube(n)
    B = rng.standard_normal((p, m))
    if m >= 2 and rng.random() < 0.25:
        B[:, -1] = B[:, :-1] @ rng.standard_normal(m - 1)
    if norm is NormKind.L2:
        A = rng.standard_normal((p, n))
        d = rng.standard_normal(p)
    else:
        A = B @ rng.standard_normal((m, n))
        d = B @ rng.standard_normal(m)
    X = domain.array
    base = np.array([norm.of(A @ x + d) for x in X])
    f = base * rng.uniform(1.0, 1.5, size=domain.size) + rng.uniform(0.2, 2.0, size=domain.size)
    conic_set = ConicSet(domain=domain, A=A, B=B, d=d, f=TableRhs(values=tuple(f)), norm=norm)
    if norm is NormKind.L2:
        conic_set, _ = normalize_assumption2(conic_set)
    return conic_set


@dataclass
class HullSuiteReport:
    reports: list[HullReport] = field(default_factory=list)
    sets: list[ConicSet] = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return sum(len(r.disagreements) for r in self.reports)

    @property
    def errors(self) -> int:
        return sum(len(r.errors) for r in self.reports)

    @property
    def confirmed(self) -> bool:
        return all(r.confirmed for r in self.reports)

    def to_data_frame(self) -> pd.DataFrame:
        frames = []
        for set_id, report in enumerate(self.reports):
            frame = report.to_data_frame()
            frame.insert(0, "set_id", set_id)
            frames.append(frame)
        if not frames:
            return pd.DataFrame()
        return pd.concat(frames, ignore_index=True)


def run_hull_suite(
    sets: int,
    n: int,
    m: int,
    p: int,
    norm: NormKind,
    trials: int,
    seed: int,
    method: str = "auto",
) -> HullSuiteReport:
    """Generate `sets` random sets and verify hull equivalence on each, all from one seed."""
    rng = np.random.default_rng(seed)
    suite = HullSuiteReport()
    for set_id in range(sets):
        conic_set = random_hull_instance(n, m, p, norm, rng)
        report = verify_hull_equivalence(conic_set, trials, rng, method=method)
        suite.sets.append(conic_set)
        suite.reports.append(report)
        logger.info("set %d of %d verified: %s", set_id + 1, sets, report.summary())
    return suite


class HullVerifyError(SocvexifyError):
    """Custom error for the hull membership oracles."""

    pass


class PointNotInDomain(HullVerifyError):
    """Custom error for an x that is not a point of the binary domain."""

    pass


class PerspectiveError(HullVerifyError):
    """Custom error for a perspective formulation that cannot be built."""

    pass


class HullNumericalLimit(HullVerifyError):
    """Custom error for a perspective solve that ended without an optimal solution."""

    pass
