import numpy as np
import pytest

from socvexify import BinaryDomain, RhsFunction, RhsFunctionError, SqrtQuadraticRhs, TableRhs
from socvexify import Tolerances, set_tolerances


def test_table_values():
    domain = BinaryDomain.full_cube(1)
    f = TableRhs(values=(1, 2))
    assert f.values_on(domain).tolist() == [1.0, 2.0]
    assert f.radicands_on(domain).tolist() == [1.0, 4.0]
    assert f.evaluate(domain, [1]) == 2.0
    with pytest.raises(RhsFunctionError):
        f.evaluate(domain, [0.5])


def test_table_length_mismatch():
    domain = BinaryDomain.full_cube(2)
    f = TableRhs(values=(1, 2))
    with pytest.raises(RhsFunctionError):
        f.values_on(domain)
    assert any("2 values for 4" in m for m in f.violations(domain))


def test_table_negative_value():
    domain = BinaryDomain.full_cube(1)
    f = TableRhs(values=(1, -1))
    assert any("negative" in m for m in f.violations(domain))
    with pytest.raises(RhsFunctionError):
        f.values_on(domain)


def test_sqrt_quadratic():
    domain = BinaryDomain.full_cube(2)
    # f(x)^2 = x1^2 + 2 x1 x2 + 3 x2 + 1
    f = SqrtQuadraticRhs(P=[[1, 1], [1, 0]], r=[0, 3], s=1)
    assert f.radicands_on(domain).tolist() == [1.0, 2.0, 4.0, 7.0]
    assert np.allclose(f.values_on(domain), np.sqrt([1, 2, 4, 7]))
    assert f.radicand([1, 1]) == 7.0
    assert f.violations(domain) == []


def test_radicand_clamp():
    domain = BinaryDomain.full_cube(1)
    # radicand -1e-12 at x = 1 is clamped to 0
    f = SqrtQuadraticRhs(P=[[0]], r=[-1 - 1e-12], s=1)
    assert f.values_on(domain).tolist() == [1.0, 0.0]
    # radicand -1e-3 is an error
    g = SqrtQuadraticRhs(P=[[0]], r=[-1.001], s=1)
    with pytest.raises(RhsFunctionError):
        g.values_on(domain)
    assert any("negative" in m for m in g.violations(domain))
    # a larger clamp accepts it
    set_tolerances(Tolerances(radicand_clamp=1e-2))
    assert g.values_on(domain)[1] == 0.0


def test_sqrt_quadratic_shape_mismatch():
    f = SqrtQuadraticRhs(P=np.eye(2), r=[0, 0], s=1)
    with pytest.raises(RhsFunctionError):
        f.radicands_on(BinaryDomain.full_cube(3))


def test_from_dict():
    table = RhsFunction.from_dict({"table": [1, 2]})
    assert table == TableRhs(values=(1.0, 2.0))
    quadratic = RhsFunction.from_dict({"sqrt_quadratic": {"P": [[1]], "r": [2], "s": 3}})
    assert quadratic == SqrtQuadraticRhs(P=[[1.0]], r=[2.0], s=3.0)
    assert RhsFunction.from_dict(quadratic.to_dict()) == quadratic
    with pytest.raises(RhsFunctionError):
        RhsFunction.from_dict({"values": [1]})


def test_incomplete_subclass():
    class OnlyRadicands(RhsFunction):
        def radicands_on(self, domain):
            return np.ones(domain.size)

    with pytest.raises(TypeError):
        RhsFunction()
    with pytest.raises(TypeError):
        OnlyRadicands()
