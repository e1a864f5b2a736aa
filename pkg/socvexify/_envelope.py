from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from socvexify._binary_domain import BinaryDomain
from socvexify._config import get_tolerances
from socvexify._errors import SocvexifyError
from socvexify._lp_solver import LpProblem, solve_lp
from socvexify._solve_result import Sense, SolveStatus
from socvexify._verdicts import EnvelopeCertificate, SupportPoint

logger = logging.getLogger(__name__)


def _checked_inputs(domain: BinaryDomain, values, query) -> tuple[np.ndarray, np.ndarray]:
    values = np.array(values, dtype=float).ravel()
    query = np.array(query, dtype=float).ravel()
    if values.size != domain.size:
        raise EnvelopeError(
            f"Got {values.size} values for a domain of {domain.size} points."
        )
    if query.size != domain.n:
        raise EnvelopeError(f"Query has length {query.size}, expected {domain.n}.")
    return values, query


def _combination_lp(domain: BinaryDomain, values, query, sense: Sense):
    """max|min sum lambda_k f(x^k)  s.t.  sum lambda_k x^k = query, sum lambda_k = 1, lambda >= 0"""
    X = domain.array
    A_eq = np.vstack([X.T, np.ones((1, domain.size))])
    b_eq = np.concatenate([query, [1.0]])
    problem = LpProblem(
        c=values, sense=sense, A_eq=A_eq, b_eq=b_eq, lb=np.zeros(domain.size)
    )
    result = solve_lp(problem)
    if result.status is SolveStatus.INFEASIBLE:
        raise QueryOutsideHull(f"Query {query.tolist()} is not in the convex hull of the domain.")
    if result.status is not SolveStatus.OPTIMAL:
        raise EnvelopeError(f"Envelope LP ended with status {result.status.value}.")
    return result


def _certificate(domain: BinaryDomain, values, query, weights, value) -> EnvelopeCertificate:
    """Keep the weights above the support tolerance (lowest point index first) and renormalize."""
    support_tol = get_tolerances().support
    indices = [k for k in range(domain.size) if weights[k] > support_tol]
    kept = np.array([weights[k] for k in indices])
    kept = kept / kept.sum()
    support = tuple(
        SupportPoint(
            index=k,
            point=tuple(float(v) for v in domain.points[k]),
            weight=float(w),
            value=float(values[k]),
        )
        for k, w in zip(indices, kept)
    )
    return EnvelopeCertificate(
        value=float(value), support=support, query=tuple(float(v) for v in query)
    )


def concave_envelope(domain: BinaryDomain, values, query) -> EnvelopeCertificate:
    """Value of the concave envelope of f over conv(X) at the query, with its Caratheodory support.

    f is given by its values at the domain points. The support comes from an
    optimal basic solution of the combination LP, hence has at most n+1 points."""
    values, query = _checked_inputs(domain, values, query)
    result = _combination_lp(domain, values, query, Sense.MAX)
    certificate = _certificate(domain, values, query, result.x, result.value)
    logger.debug(
        "envelope at %s = %.9g with %d support points",
        query.tolist(),
        certificate.value,
        len(certificate.support),
    )
    return certificate


def convex_envelope(domain: BinaryDomain, values, query) -> EnvelopeCertificate:
    """Largest convex minorant of f over conv(X) at the query (same LP, minimized)."""
    values, query = _checked_inputs(domain, values, query)
    result = _combination_lp(domain, values, query, Sense.MIN)
    return _certificate(domain, values, query, result.x, result.value)


@dataclass(frozen=True)
class EnvelopeGap:
    """Largest distance between the concave and the convex envelope over a list of samples."""

    gap: float
    argmax: tuple[float, ...] | None
    gaps: tuple[float, ...]


def envelope_gap_to_function(domain: BinaryDomain, values, samples) -> EnvelopeGap:
    """Max over the samples of f_hat minus the interpolation of f from below (its convex envelope).

    Both envelopes pass through f at every domain point, so the gap is 0 there
    and for affine f everywhere."""
    gaps = []
    for query in samples:
        upper = concave_envelope(domain, values, query).value
        lower = convex_envelope(domain, values, query).value
        gaps.append(max(upper - lower, 0.0))
    if not gaps:
        return EnvelopeGap(gap=0.0, argmax=None, gaps=())
    best = int(np.argmax(gaps))
    argmax = tuple(float(v) for v in np.ravel(samples[best]))
    return EnvelopeGap(gap=float(gaps[best]), argmax=argmax, gaps=tuple(gaps))


def contains_hull_point(domain: BinaryDomain, query) -> bool:
    """True when the query lies in conv(X)."""
    try:
        concave_envelope(domain, np.zeros(domain.size), query)
    except QueryOutsideHull:
        return False
    return True


def envelope_on_domain(domain: BinaryDomain, values) -> np.ndarray:
    """f_hat evaluated at every domain point."""
    return np.array(
        [concave_envelope(domain, values, point).value for point in domain.array]
    )


def dirichlet_weights(domain: BinaryDomain, count: int, rng: np.random.Generator) -> np.ndarray:
    """Dirichlet(1, ..., 1) weights on the domain points, one row per sample."""
    return rng.dirichlet(np.ones(domain.size), size=count)


def dirichlet_hull_points(domain: BinaryDomain, count: int, rng: np.random.Generator) -> np.ndarray:
    """Random points of conv(X): Dirichlet(1, ..., 1) weights on the domain points."""
    return dirichlet_weights(domain, count, rng) @ domain.array


class EnvelopeError(SocvexifyError):
    """Custom error for the envelope computations."""

    pass


class QueryOutsideHull(EnvelopeError):
    """Custom error for a query point outside the convex hull of the domain."""

    pass
