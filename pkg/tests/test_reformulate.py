import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from socvexify import (
    BinaryDomain,
    ConicSet,
    DrccConstraint,
    EmptyDomainAfterRestriction,
    NormalizationError,
    NormKind,
    NotPositiveDefinite,
    QuadConstraint,
    QuadraticForm,
    ReformulationError,
    TableRhs,
    concave_envelope,
    drcc_to_quad,
    normalize_assumption2,
    quad_to_soc,
)


def _random_quad(rng, n, m, quadratic_g=False):
    G = rng.standard_normal((m, m))
    Qxx = rng.standard_normal((n, n))
    g = 5.0
    if quadratic_g:
        g = QuadraticForm(P=np.diag(rng.uniform(0, 1, n)), r=rng.standard_normal(n), s=5.0)
    return QuadConstraint(
        Qxx=(Qxx + Qxx.T) / 2,
        Qxy=rng.standard_normal((n, m)),
        Qyy=G @ G.T + np.eye(m),
        ax=rng.standard_normal(n),
        ay=rng.standard_normal(m),
        g=g,
    )


@given(seed=st.integers(min_value=0, max_value=2**32 - 1), quadratic_g=st.booleans())
@settings(max_examples=30, deadline=None)
def test_quad_to_soc_identity(seed, quadratic_g):
    rng = np.random.default_rng(seed)
    q = _random_quad(rng, 3, 2, quadratic_g)
    pieces = quad_to_soc(q)
    assert np.allclose(pieces.B.T @ pieces.B, q.Qyy)
    for _ in range(5):
        x = rng.integers(0, 2, 3)
        y = rng.standard_normal(2) * 3
        # f(x)^2 - ||Ax + By + d||^2 equals g(x) - lhs(x, y) everywhere
        assert pieces.residual(x, y) == pytest.approx(q.slack(x, y), rel=1e-8, abs=1e-8)


def test_quad_to_soc_requires_pd_block():
    q = QuadConstraint(
        Qxx=np.zeros((1, 1)), Qxy=[[1.0]], Qyy=[[0.0]], ax=[0.0], ay=[1.0], g=1.0
    )
    with pytest.raises(NotPositiveDefinite):
        quad_to_soc(q)


def test_quad_constraint_validation():
    with pytest.raises(ReformulationError):
        QuadConstraint(
            Qxx=[[1.0, 2.0], [0.0, 1.0]],
            Qxy=np.zeros((2, 1)),
            Qyy=[[1.0]],
            ax=[0, 0],
            ay=[0],
            g=1.0,
        )
    with pytest.raises(ReformulationError):
        QuadConstraint(
            Qxx=np.eye(2),
            Qxy=np.zeros((2, 1)),
            Qyy=[[1.0]],
            ax=[0, 0],
            ay=[0],
            g=QuadraticForm.constant(1.0, 3),
        )


def test_drcc_validation():
    with pytest.raises(ReformulationError):
        DrccConstraint.from_joint([1, 1], np.eye(2), 1.0, 1.0, 1)
    with pytest.raises(ReformulationError):
        DrccConstraint.from_joint([1, 1], np.eye(2), np.inf, 0.1, 1)
    assert DrccConstraint.from_joint([1, 1], np.eye(2), 1.0, 0.5, 1).alpha_tilde == 1.0


def test_toy_sigma_tilde(toy_instance, toy_instance_pd):
    reformulation = drcc_to_quad(toy_instance.drcc(0))
    assert reformulation.alpha_tilde == 1.0
    assert np.allclose(reformulation.quad.Qyy, 0.0)
    assert not reformulation.sigma_tilde_yy_pd
    assert drcc_to_quad(toy_instance_pd.drcc(0)).sigma_tilde_yy_pd
    # (1, 0) is on the boundary of both rows
    assert reformulation.slacks([1], [0]) == pytest.approx((0.0, 1.0))


@given(seed=st.integers(min_value=0, max_value=2**32 - 1), alpha=st.sampled_from([0.05, 0.2, 0.5]))
@settings(max_examples=30, deadline=None)
def test_drcc_equivalence(seed, alpha):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((4, 4))
    mu = rng.uniform(0.5, 2, 4)
    dr = DrccConstraint.from_joint(mu, G @ G.T / 4, 4.0, alpha, 2)
    reformulation = drcc_to_quad(dr)
    for _ in range(10):
        x = rng.integers(0, 2, 2)
        y = rng.uniform(0, 1.5, 2)
        slack = dr.slack(x, y)
        if abs(slack) < 1e-6:
            continue
        quad_slack, linear_slack = reformulation.slacks(x, y)
        assert (slack >= 0) == (quad_slack >= 0 and linear_slack >= 0)


def test_example1_normalization(disc_set):
    normalized, report = normalize_assumption2(disc_set)
    assert not report.assumption2_held
    assert report.dropped == ()
    assert np.allclose(normalized.A, 0.0)
    assert np.allclose(normalized.f_values(), [np.sqrt(2), 1.0])
    for x in [0.0, 0.25, 0.5, 0.75, 1.0]:
        value = concave_envelope(normalized.domain, normalized.f_values(), [x]).value
        assert value == pytest.approx((1 - np.sqrt(2)) * x + np.sqrt(2), abs=1e-9)
    # a second pass changes nothing
    again, second = normalize_assumption2(normalized)
    assert second.assumption2_held
    assert again.domain == normalized.domain
    assert np.allclose(again.f_values(), normalized.f_values())


def test_normalization_drops_points(two_point_domain):
    conic_set = ConicSet(
        domain=two_point_domain,
        A=[[1.0], [0.0]],
        B=[[0.0], [1.0]],
        d=[0.0, 0.0],
        f=TableRhs(values=(np.sqrt(2), 0.5)),
    )
    normalized, report = normalize_assumption2(conic_set)
    assert report.kept == (0,)
    assert report.dropped == (1,)
    assert report.dropped_points == ((1,),)
    assert normalized.domain.points == ((0,),)
    assert report.to_dict()["radicands"] == pytest.approx([2.0, -0.75])


def test_normalization_empties_domain(two_point_domain):
    conic_set = ConicSet(
        domain=two_point_domain,
        A=[[1.0], [0.0]],
        B=[[0.0], [1.0]],
        d=[1.0, 0.0],
        f=TableRhs(values=(0.1, 0.1)),
    )
    with pytest.raises(EmptyDomainAfterRestriction):
        normalize_assumption2(conic_set)


def test_normalization_other_norms(two_point_domain):
    conic_set = ConicSet(
        domain=two_point_domain,
        A=[[1.0], [0.0]],
        B=[[0.0], [1.0]],
        d=[0.0, 0.0],
        f=TableRhs(values=(1.0, 1.0)),
        norm=NormKind.L1,
    )
    with pytest.raises(NormalizationError):
        normalize_assumption2(conic_set)
    # a set that already satisfies the condition passes in any norm
    ok = ConicSet(
        domain=BinaryDomain.full_cube(1),
        A=[[0.0], [2.0]],
        B=[[0.0], [1.0]],
        d=[0.0, 1.0],
        f=TableRhs(values=(1.0, 1.0)),
        norm=NormKind.LINF,
    )
    normalized, report = normalize_assumption2(ok)
    assert normalized == ok
    assert report.assumption2_held


def test_soc_pieces_to_conic_set(toy_instance_pd):
    pieces = quad_to_soc(drcc_to_quad(toy_instance_pd.drcc(0)).quad)
    conic_set = pieces.to_conic_set(BinaryDomain.full_cube(1))
    assert conic_set.validate() == []
    # q(0) = 16/3 and q(1) = 1/3
    assert np.allclose(conic_set.f_values() ** 2, [16 / 3, 1 / 3])
