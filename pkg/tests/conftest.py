import numpy as np
import pytest

from socvexify import (
    BinaryDomain,
    ConicSet,
    KnapsackInstance,
    Resource,
    TableRhs,
    Tolerances,
    set_tolerances,
)


@pytest.fixture(autouse=True)
def default_tolerances():
    """Every test starts from the default tolerances, whatever the previous one set."""
    previous = set_tolerances(Tolerances())
    yield
    set_tolerances(previous)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def two_point_domain() -> BinaryDomain:
    return BinaryDomain.full_cube(1)


@pytest.fixture
def disc_set(two_point_domain) -> ConicSet:
    """||(x, y)||_2 <= sqrt(2) over X = {0, 1}, the first example set."""
    return ConicSet(
        domain=two_point_domain,
        A=np.array([[1.0], [0.0]]),
        B=np.array([[0.0], [1.0]]),
        d=np.zeros(2),
        f=TableRhs(values=(np.sqrt(2.0), np.sqrt(2.0))),
    )


@pytest.fixture
def toy_instance() -> KnapsackInstance:
    """One binary and one continuous item, mu = (1, 1), Sigma = I, alpha = 1/2, c = 2.

    The optimum is 3 at (x, y) = (1, 0)."""
    return KnapsackInstance(
        n=1,
        m=1,
        profits_x=[3.0],
        profits_y=[1.0],
        resources=(Resource(mu=[1.0, 1.0], sigma=np.eye(2), capacity=2.0),),
        alpha=0.5,
    )


@pytest.fixture
def toy_instance_pd() -> KnapsackInstance:
    """Same toy with mu_y = 1/2, so that Sigma~yy = 3/4 is positive definite.

    x = 1 still forces y = 0, the optimum stays 3 at (1, 0)."""
    return KnapsackInstance(
        n=1,
        m=1,
        profits_x=[3.0],
        profits_y=[1.0],
        resources=(Resource(mu=[1.0, 0.5], sigma=np.eye(2), capacity=2.0),),
        alpha=0.5,
    )
