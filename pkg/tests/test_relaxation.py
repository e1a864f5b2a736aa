import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from socvexify import (
    BinaryDomain,
    InvalidRange,
    RelaxationError,
    bhatia_davis_check,
    gap_bound,
    sqrt_envelope_value,
    verify_prop1,
)


# data for test_gap_bound
gap_bound_data = [
    (1.0, 2.0, 1 / 12),
    (0.0, 1.0, 0.25),
    (3.0, 3.0, 0.0),
    (0.0, 0.0, 0.0),
]


@pytest.mark.parametrize("L, U, expected", gap_bound_data)
def test_gap_bound(L, U, expected):
    assert gap_bound(L, U) == pytest.approx(expected)


def test_gap_bound_invalid_range():
    with pytest.raises(InvalidRange):
        gap_bound(-1.0, 2.0)
    with pytest.raises(InvalidRange):
        gap_bound(3.0, 2.0)


@given(
    L1=st.floats(0, 100, allow_nan=False),
    L2=st.floats(0, 100, allow_nan=False),
    U=st.floats(0, 100, allow_nan=False),
)
@settings(max_examples=100, deadline=None)
def test_gap_bound_decreases_in_L(L1, L2, U):
    assume(max(L1, L2) <= U)
    low, high = sorted([L1, L2])
    assert gap_bound(high, U) <= gap_bound(low, U) + 1e-12


def test_sqrt_envelope_value(two_point_domain):
    assert sqrt_envelope_value(two_point_domain, [1.0, 4.0], [0.5]) == pytest.approx(np.sqrt(2.5))
    with pytest.raises(RelaxationError):
        sqrt_envelope_value(two_point_domain, [-1.0, 4.0], [0.5])


def test_two_point_gap(two_point_domain):
    grid = np.array([[0.0], [0.25], [0.5], [0.75], [1.0]])
    report = verify_prop1(two_point_domain, [1.0, 2.0], grid=grid)
    assert report.holds
    assert report.bound == pytest.approx(1 / 12)
    assert report.max_gap == pytest.approx(np.sqrt(2.5) - 1.5)
    assert report.argmax == (0.5,)
    assert list(report.frame.columns) == ["x1", "f_hat", "sqrt_q_hat", "gap", "bound"]
    # the bound is attained at x = 5/12
    tight = verify_prop1(two_point_domain, [1.0, 2.0], grid=[[5 / 12]])
    assert tight.max_gap == pytest.approx(1 / 12)
    assert tight.holds


def test_constant_function_has_no_gap(rng):
    domain = BinaryDomain.full_cube(2)
    report = verify_prop1(domain, [1.5] * 4, rng=rng)
    assert report.holds
    assert report.bound == 0.0
    assert report.max_gap == pytest.approx(0.0, abs=1e-9)


def test_random_functions(rng):
    domain = BinaryDomain.full_cube(3)
    for _ in range(3):
        fvalues = rng.uniform(0.5, 3.0, domain.size)
        report = verify_prop1(domain, fvalues, rng=rng)
        assert report.holds, report.failures
        assert len(report.frame) == 200 + domain.size
        assert report.summary()["holds"]


def test_verify_prop1_errors(two_point_domain):
    with pytest.raises(RelaxationError):
        verify_prop1(two_point_domain, [-1.0, 1.0])


def test_bhatia_davis(rng):
    # two point distributions attain the bound
    assert bhatia_davis_check([([1.0, 3.0], [0.25, 0.75])])
    samples = []
    for _ in range(50):
        values = rng.uniform(0, 10, 5)
        samples.append((values, rng.dirichlet(np.ones(5))))
    assert bhatia_davis_check(samples)
    # weights that are not a distribution can break it
    assert not bhatia_davis_check([([0.0, 1.0], [1.0, 1.0])])
