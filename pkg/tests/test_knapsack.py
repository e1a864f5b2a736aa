import math
import os

import numpy as np
import pytest

from socvexify import (
    InvalidType,
    KnapsackError,
    KnapsackInstance,
    Resource,
    SigmaTildeNotPD,
    SolveStatus,
    build_ccp,
    build_soc,
    ccp_relaxation,
    cholesky,
    generate_kp,
    generate_mkp,
    relaxation_bounds,
    soc_envelope_relaxation,
    solve_bruteforce,
)


def test_type_rules():
    strong = generate_kp(10, 3, 2, seed=1)
    weights = np.array(strong.scale["base_weights"])
    profits = np.array(strong.scale["base_profits"])
    assert np.array_equal(profits, weights + 1000)
    inverse = generate_kp(10, 4, 2, seed=1)
    assert np.array_equal(
        np.array(inverse.scale["base_weights"]), np.array(inverse.scale["base_profits"]) + 1000
    )
    weak = generate_kp(40, 2, 1, seed=1)
    weights = np.array(weak.scale["base_weights"])
    profits = np.array(weak.scale["base_profits"])
    assert np.all((np.abs(profits - weights) <= 1000) | (profits == 1))
    uncorrelated = generate_kp(40, 1, 1, seed=1)
    assert np.all(np.array(uncorrelated.scale["base_weights"]) >= 1)
    assert np.all(np.array(uncorrelated.scale["base_weights"]) <= 10000)


def test_scaling_and_capacity():
    instance = generate_kp(10, 1, 3, seed=5)
    weights = np.array(instance.scale["base_weights"])
    profits = np.array(instance.scale["base_profits"])
    resource = instance.resources[0]
    assert (instance.n, instance.m) == (5, 5)
    assert np.allclose(resource.mu, weights / 1000)
    assert np.allclose(instance.profits_x, profits[:5])
    assert np.allclose(instance.profits_y, profits[5:] / 5)
    # capacity sum(w) * 3 / 6, divided by 1000 and multiplied by 3/2
    assert resource.capacity == pytest.approx(weights.sum() * 3 / 6 / 1000 * 1.5)
    assert instance.type == 1
    assert instance.index == 3


def test_covariance():
    instance = generate_kp(20, 4, 5, seed=2)
    sigma = instance.resources[0].sigma
    assert np.allclose(sigma, sigma.T)
    cholesky(sigma, pivot_tol=1e-10)
    # eigenvalues are w_i^2 / 4
    expected = np.sort(instance.resources[0].mu ** 2 / 4)
    assert np.allclose(np.sort(np.linalg.eigvalsh(sigma)), expected)


def test_generation_is_deterministic():
    first = generate_kp(12, 2, 4, seed=11).to_json()
    assert generate_kp(12, 2, 4, seed=11).to_json() == first
    assert generate_kp(12, 2, 4, seed=12).to_json() != first
    assert generate_mkp(6, 3, seed=11).to_json() == generate_mkp(6, 3, seed=11).to_json()


# data for test_generate_kp_errors
kp_error_data = [
    ((10, 5, 1), InvalidType),
    ((10, 1, 0), KnapsackError),
    ((10, 1, 6), KnapsackError),
    ((9, 1, 1), KnapsackError),
    ((0, 1, 1), KnapsackError),
]


@pytest.mark.parametrize("arguments, error", kp_error_data)
def test_generate_kp_errors(arguments, error):
    with pytest.raises(error):
        generate_kp(*arguments)


def test_generate_mkp():
    instance = generate_mkp(5, 2, seed=3)
    assert (instance.n, instance.m) == (5, 3)
    assert len(instance.resources) == 2
    assert instance.type is None
    assert instance.synthetic_base
    base_profits = instance.scale["base_profits"]
    assert all(1 <= p <= max(base_profits) // 10 for p in instance.scale["continuous_profits"])
    for j, resource in enumerate(instance.resources):
        base = np.array(instance.scale["base_weights"][j])
        extra = np.array(instance.scale["continuous_weights"][j])
        assert np.all(extra >= math.ceil(base.min() / 2))
        assert np.all(extra <= base.max())
        assert np.allclose(resource.mu, np.concatenate([base, extra]) / 100)
        assert resource.capacity == pytest.approx(base.sum() / 2 / 10)
    with pytest.raises(KnapsackError):
        generate_mkp(1, 2)
    with pytest.raises(KnapsackError):
        generate_mkp(4, 0)


def test_json_round_trip(tmp_path):
    instance = generate_mkp(4, 2, seed=9)
    restored = KnapsackInstance.from_json(instance.to_json())
    assert restored.to_json() == instance.to_json()
    file_name = os.path.join(tmp_path, "mkp.json")
    with open(file_name, "w") as f:
        f.write(instance.to_json())
    assert KnapsackInstance.from_file(file_name).to_dict() == instance.to_dict()


def test_instance_errors(toy_instance):
    with pytest.raises(KnapsackError):
        KnapsackInstance.from_file("non-existing-file")
    with pytest.raises(KnapsackError):
        KnapsackInstance.from_json("[")
    data = toy_instance.to_dict()
    data["alpha"] = 1.5
    with pytest.raises(KnapsackError):
        KnapsackInstance.from_dict(data)
    data = toy_instance.to_dict()
    del data["resources"]
    with pytest.raises(KnapsackError):
        KnapsackInstance.from_dict(data)
    # sigma with a negative eigenvalue
    broken = KnapsackInstance(
        n=1,
        m=1,
        profits_x=[1.0],
        profits_y=[1.0],
        resources=(Resource(mu=[1.0, 1.0], sigma=[[1.0, 0.0], [0.0, -1.0]], capacity=1.0),),
    )
    assert any("positive semidefinite" in m for m in broken.violations())


def test_ccp_model(toy_instance):
    model = build_ccp(toy_instance)
    assert model.validate() == []
    assert model.names == ["x_0", "y_0"]
    assert [c.name for c in model.linear] == ["mean_0"]
    quad = model.quadratic[0]
    assert quad.name == "drcc_0"
    # z'(I - mu mu')z + 4 mu'z <= 4
    assert quad.terms == (("x_0", "y_0", -2.0),)
    assert quad.linear == {"x_0": 4.0, "y_0": 4.0}
    assert quad.rhs == pytest.approx(4.0)


def test_soc_model(toy_instance_pd):
    model = build_soc(toy_instance_pd)
    assert model.validate() == []
    assert model.names == ["x_0", "y_0", "eta_0", "tau_0"]
    assert [c.name for c in model.soc] == ["soc_0"]
    assert [c.name for c in model.rotated] == ["rot_0"]
    assert [c.name for c in model.quadratic] == ["hypo_0"]
    without = build_soc(toy_instance_pd, hypograph=False)
    assert without.quadratic == []


def test_sigma_tilde_not_pd(toy_instance):
    with pytest.raises(SigmaTildeNotPD):
        build_soc(toy_instance)
    with pytest.raises(SigmaTildeNotPD):
        build_soc(generate_kp(4, 1, 1, alpha=0.9))


def _tiny_instance(capacity: float, correlated: bool) -> KnapsackInstance:
    mu = np.array([1.0, 1.5, 0.8, 1.2])
    sigma = np.diag(mu**2)
    if correlated:
        sigma = sigma + 0.1 * np.outer(mu, mu)
    return KnapsackInstance(
        n=2,
        m=2,
        profits_x=[4.0, 5.0],
        profits_y=[2.0, 3.0],
        resources=(Resource(mu=mu, sigma=sigma, capacity=capacity),),
        alpha=0.1,
    )


# data for test_ccp_and_soc_agree
agreement_data = [(kp_type, index) for kp_type in (1, 2, 3, 4) for index in (1, 2, 3, 4, 5)]


def _assert_same_optimum(instance: KnapsackInstance) -> None:
    ccp = solve_bruteforce(build_ccp(instance))
    soc = solve_bruteforce(build_soc(instance))
    assert ccp.status is SolveStatus.OPTIMAL
    assert soc.status is SolveStatus.OPTIMAL
    assert soc.value == pytest.approx(ccp.value, rel=1e-5)
    # both optima satisfy every robust constraint
    for solution in (ccp, soc):
        x = [solution.assignment[f"x_{i}"] for i in range(instance.n)]
        y = [solution.assignment[f"y_{i}"] for i in range(instance.m)]
        for j in range(len(instance.resources)):
            assert instance.drcc(j).slack(x, y) >= -1e-5


@pytest.mark.parametrize("kp_type, index", agreement_data)
def test_ccp_and_soc_agree(kp_type, index):
    _assert_same_optimum(generate_kp(6, kp_type, index, seed=7))


@pytest.mark.parametrize("n", [4, 5, 6])
def test_ccp_and_soc_agree_mkp(n):
    _assert_same_optimum(generate_mkp(n, 2, seed=3))


def test_largest_capacity_optimum():
    instance = generate_kp(6, 1, 5, seed=7)
    solution = solve_bruteforce(build_soc(instance))
    assert solution.status is SolveStatus.OPTIMAL
    assert solution.value == pytest.approx(2562.758, abs=1e-3)
    assert [solution.assignment[f"x_{i}"] for i in range(3)] == [0.0, 0.0, 1.0]


def test_uncorrelated_type():
    for index in (1, 2, 3, 4, 5):
        instance = generate_kp(400, 1, index, seed=7)
        weights = np.array(instance.scale["base_weights"])
        profits = np.array(instance.scale["base_profits"])
        assert abs(np.corrcoef(weights, profits)[0, 1]) < 0.2
    strong = generate_kp(400, 3, 1, seed=7)
    weights = np.array(strong.scale["base_weights"])
    profits = np.array(strong.scale["base_profits"])
    assert np.corrcoef(weights, profits)[0, 1] > 0.99


def test_relaxations():
    instance = _tiny_instance(5.0, False)
    assert ccp_relaxation(instance).integer_variables == []
    model, concave = soc_envelope_relaxation(instance)
    assert concave
    assert model.integer_variables == []
    assert sum(c.name.startswith("hull_") for c in model.linear) == 2
    bounds = relaxation_bounds(instance)
    assert bounds.q_concave
    assert bounds.dominates
    # the relaxations bound the integer optimum
    optimum = solve_bruteforce(build_ccp(instance)).value
    assert bounds.soc_envelope >= optimum - 1e-5
    assert bounds.to_dict()["dominates"] is True


# data for test_relaxations_on_generated_instances
relaxation_data = [(kp_type, index) for kp_type in (1, 2, 3, 4) for index in (1, 3, 5)]


@pytest.mark.parametrize("kp_type, index", relaxation_data)
def test_relaxations_on_generated_instances(kp_type, index):
    instance = generate_kp(6, kp_type, index, seed=7)
    bounds = relaxation_bounds(instance)
    assert bounds.ccp is not None
    assert bounds.soc_envelope is not None
    if bounds.q_concave:
        assert bounds.dominates
    optimum = solve_bruteforce(build_ccp(instance)).value
    assert bounds.ccp >= optimum - 1e-5 * (1 + abs(optimum))
    assert bounds.soc_envelope >= optimum - 1e-5 * (1 + abs(optimum))


def test_envelope_relaxation_size():
    with pytest.raises(KnapsackError):
        soc_envelope_relaxation(generate_kp(26, 1, 1))
