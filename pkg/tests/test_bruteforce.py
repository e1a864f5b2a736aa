import math

import numpy as np
import pytest

from socvexify import (
    AffineExpr,
    BinaryDomain,
    BruteForceError,
    KnapsackInstance,
    LinearConstraint,
    ModelIR,
    NonConvexContinuousPart,
    Objective,
    QuadraticConstraint,
    Resource,
    RotatedConeConstraint,
    SocConstraint,
    SolveResult,
    SolveStatus,
    build_ccp,
    build_soc,
    solve_bruteforce,
    solve_continuous,
)
from socvexify._bruteforce import _ContinuousPart


def test_toy_ccp(toy_instance):
    solution = solve_bruteforce(build_ccp(toy_instance))
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.value == pytest.approx(3.0)
    assert solution.assignment == pytest.approx({"x_0": 1.0, "y_0": 0.0})
    assert solution.result.residuals["primal"] <= 1e-7


def test_toy_soc(toy_instance_pd):
    solution = solve_bruteforce(build_soc(toy_instance_pd))
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.value == pytest.approx(3.0, abs=1e-3)
    assert solution.assignment["x_0"] == 1.0


# data for test_capacity_sweep
capacity_data = [(0.5, 0.25), (1.0, 0.5), (1.5, 0.75), (2.0, 3.0), (3.0, 3.75), (4.0, 4.0)]


@pytest.mark.parametrize("capacity, expected", capacity_data)
def test_capacity_sweep(capacity, expected):
    instance = KnapsackInstance(
        n=1,
        m=1,
        profits_x=[3.0],
        profits_y=[1.0],
        resources=(Resource(mu=[1.0, 1.0], sigma=np.eye(2), capacity=capacity),),
        alpha=0.5,
    )
    assert solve_bruteforce(build_ccp(instance)).value == pytest.approx(expected)


def test_capacity_monotone():
    values = []
    for capacity in np.linspace(0.2, 5.0, 13):
        instance = KnapsackInstance(
            n=2,
            m=1,
            profits_x=[3.0, 2.0],
            profits_y=[1.0],
            resources=(Resource(mu=[1.0, 0.8, 1.0], sigma=np.eye(3), capacity=capacity),),
            alpha=0.5,
        )
        values.append(solve_bruteforce(build_ccp(instance)).value)
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_infeasible_model():
    model = ModelIR()
    model.add_variable("x", upper=1.0, integer=True)
    model.linear.append(LinearConstraint("low", {"x": 1.0}, ">=", 2.0))
    solution = solve_bruteforce(model)
    assert solution.status is SolveStatus.INFEASIBLE
    assert solution.assignment is None
    # both fixings fail the box test
    assert solution.pruned == 2


def test_unbounded_model():
    model = ModelIR()
    model.add_variable("x", upper=1.0, integer=True)
    model.add_variable("y")
    model.objective = Objective(coeffs={"y": 1.0})
    assert solve_bruteforce(model).status is SolveStatus.UNBOUNDED


def test_restricted_domain():
    model = ModelIR()
    model.add_variable("a", upper=1.0, integer=True)
    model.add_variable("b", upper=1.0, integer=True)
    model.objective = Objective(coeffs={"a": 1.0, "b": 2.0})
    domain = BinaryDomain.from_points([[0, 0], [1, 0]])
    solution = solve_bruteforce(model, domain)
    assert solution.value == pytest.approx(1.0)
    assert solution.assignment == {"a": 1.0, "b": 0.0}
    with pytest.raises(BruteForceError):
        solve_bruteforce(model, BinaryDomain.full_cube(3))


def _binary_model() -> ModelIR:
    """max a + 2b + 1/2 over binaries with a cone, a bilinear and a hyperbolic row."""
    model = ModelIR()
    model.add_variable("a", upper=1.0, integer=True)
    model.add_variable("b", upper=1.0, integer=True)
    model.objective = Objective(coeffs={"a": 1.0, "b": 2.0}, constant=0.5)
    model.soc.append(
        SocConstraint(
            "disc",
            rows=(AffineExpr({"a": 1.0}), AffineExpr({"b": 1.0})),
            rhs=AffineExpr(constant=1.2),
        )
    )
    model.quadratic.append(
        QuadraticConstraint.from_matrix("product", ["a", "b"], [[0, 0.5], [0.5, 0]], [0, 0], 0.0)
    )
    # b^2 <= 1 - a
    model.rotated.append(
        RotatedConeConstraint(
            "hyperbolic", lhs=(AffineExpr({"b": 1.0}),), rhs=AffineExpr({"a": -1.0}, 1.0)
        )
    )
    return model


def test_binary_model():
    solution = solve_bruteforce(_binary_model())
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.value == pytest.approx(2.5)
    assert solution.assignment == {"a": 0.0, "b": 1.0}
    assert solution.result.residuals["primal"] <= 1e-9


def test_binary_model_infeasible():
    model = _binary_model()
    model.quadratic.clear()
    # only the cone rows rule out (1, 1)
    solution = solve_bruteforce(model, BinaryDomain.from_points([[1, 1]]))
    assert solution.status is SolveStatus.INFEASIBLE
    assert solution.explored == 1


def _fixing_model() -> ModelIR:
    model = ModelIR()
    model.add_variable("a", upper=1.0, integer=True)
    model.add_variable("b", upper=1.0, integer=True)
    model.add_variable("y", upper=1.0)
    model.objective = Objective(coeffs={"a": 1.0, "b": 5.0, "y": 1.0})
    return model


# data for test_unsolved_fixing
unsolved_fixing_data = [
    # a fixing whose bound stays below the final optimum does not matter
    ({"a": 1.0, "b": 0.0}, SolveStatus.OPTIMAL, 6.0),
    # the best fixing is unsolved: the incumbent is only the best known point
    ({"a": 0.0, "b": 1.0}, SolveStatus.NUMERICAL_LIMIT, 2.0),
]


@pytest.mark.parametrize("failing, expected_status, expected_value", unsolved_fixing_data)
def test_unsolved_fixing(monkeypatch, failing, expected_status, expected_value):
    solve = _ContinuousPart.solve

    def solve_or_give_up(part, stop_band=None):
        if part.fixed == failing:
            return SolveResult(status=SolveStatus.NUMERICAL_LIMIT)
        return solve(part, stop_band)

    monkeypatch.setattr(_ContinuousPart, "solve", solve_or_give_up)
    domain = BinaryDomain.from_points([[0, 0], [1, 0], [0, 1]])
    solution = solve_bruteforce(_fixing_model(), domain)
    assert solution.status is expected_status
    assert solution.value == pytest.approx(expected_value)
    assert solution.explored == 3


def test_all_fixings_unsolved(monkeypatch):
    def give_up(part, stop_band=None):
        return SolveResult(status=SolveStatus.NUMERICAL_LIMIT)

    monkeypatch.setattr(_ContinuousPart, "solve", give_up)
    solution = solve_bruteforce(_fixing_model())
    assert solution.status is SolveStatus.NUMERICAL_LIMIT
    assert solution.assignment is None


def test_general_integer_rejected():
    model = ModelIR()
    model.add_variable("k", upper=5.0, integer=True)
    with pytest.raises(BruteForceError):
        solve_bruteforce(model)


def test_nonconvex_continuous_part():
    model = ModelIR()
    model.add_variable("y", upper=1.0)
    model.quadratic.append(QuadraticConstraint.from_matrix("concave", ["y"], [[-1.0]], [0.0], 1.0))
    with pytest.raises(NonConvexContinuousPart):
        solve_continuous(model)


def test_solve_continuous():
    model = ModelIR()
    model.add_variable("x", lower=-math.inf)
    model.add_variable("y", lower=-math.inf)
    model.objective = Objective(coeffs={"x": 1.0, "y": 1.0})
    model.soc.append(
        SocConstraint(
            "disc",
            rows=(AffineExpr({"x": 1.0}), AffineExpr({"y": 1.0})),
            rhs=AffineExpr(constant=1.0),
        )
    )
    solution = solve_continuous(model)
    assert solution.value == pytest.approx(math.sqrt(2), abs=1e-6)
    assert solution.assignment["x"] == pytest.approx(math.sqrt(0.5), abs=1e-4)


def test_solve_continuous_integer_variables(toy_instance):
    model = build_ccp(toy_instance)
    with pytest.raises(BruteForceError):
        solve_continuous(model)
    # relaxing x leaves an indefinite quadratic row
    with pytest.raises(NonConvexContinuousPart):
        solve_continuous(model, relax_integrality=True)
