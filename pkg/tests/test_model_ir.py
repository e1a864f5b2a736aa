import math

import pytest

from socvexify import (
    AffineExpr,
    LinearConstraint,
    ModelIR,
    ModelIRError,
    NormKind,
    Objective,
    QuadraticConstraint,
    RotatedConeConstraint,
    Sense,
    SocConstraint,
    UnrepresentableConstraint,
    export_model,
    import_model,
)


@pytest.fixture
def model():
    model = ModelIR(name="small")
    model.add_variable("x", upper=1.0, integer=True)
    model.add_variable("y", lower=-math.inf)
    model.add_variable("t")
    model.objective = Objective(sense=Sense.MAX, coeffs={"x": 3.0, "y": 1.0})
    model.linear.append(LinearConstraint("cap", {"x": 1.0, "y": 1.0}, "<=", 2.0))
    model.soc.append(
        SocConstraint(
            "cone",
            rows=(AffineExpr({"x": 1.0}), AffineExpr({"y": 2.0}, constant=-1.0)),
            rhs=AffineExpr({"t": 1.0}, constant=1.0),
        )
    )
    model.quadratic.append(
        QuadraticConstraint.from_matrix("quad", ["x", "y"], [[1, 0.5], [0.5, 2]], [1, 0], 4.0)
    )
    model.rotated.append(
        RotatedConeConstraint("rot", lhs=(AffineExpr({"y": 1.0}),), rhs=AffineExpr({"t": 1.0}))
    )
    return model


def test_validate(model):
    assert model.validate() == []
    model.linear.append(LinearConstraint("cap", {"z": 1.0}, "<", 2.0))
    model.add_variable("x")
    messages = model.validate()
    assert "variable x is declared twice" in messages
    assert "constraint name cap is used twice" in messages
    assert any("undeclared variables ['z']" in m for m in messages)
    assert any("unknown sense <" in m for m in messages)


def test_violation(model):
    # x = 1, y = 0.5, t = 0: cone ||(1, 0)|| <= 1 holds, rot 0.25 <= 0 fails by 0.25
    assert model.violation([1, 0.5, 0]) == pytest.approx(0.25)
    assert model.objective_value([1, 0.5, 0]) == pytest.approx(3.5)
    # integrality of x
    assert model.violation([0.5, 0, 1]) >= 0.5


def test_quadratic_from_matrix(model):
    quad = model.quadratic[0]
    assert quad.terms == (("x", "x", 1.0), ("x", "y", 1.0), ("y", "y", 2.0))
    assert quad.linear == {"x": 1.0}
    assert quad.lhs({"x": 1.0, "y": 1.0}) == pytest.approx(5.0)


def test_json_round_trip(model):
    text = export_model(model, "json")
    assert '"inf"' in text
    assert import_model(text) == model


def test_import_errors():
    with pytest.raises(ModelIRError):
        import_model("{")
    with pytest.raises(ModelIRError):
        import_model('{"variables": [{"lower": 0}]}')
    # objective on an undeclared variable
    with pytest.raises(ModelIRError):
        import_model('{"objective": {"coeffs": {"x": 1}}}')


def test_empty_model():
    model = ModelIR()
    assert model.validate() == []
    text = export_model(model, "lp_text")
    assert " obj: 0" in text
    assert text.endswith("End\n")


def test_lp_text(model):
    text = export_model(model, "lp_text")
    assert text.startswith("\\ Model small\nMaximize\n obj: 3 x + 1 y\n")
    assert " cap: 1 x + 1 y <= 2" in text
    assert " quad: 1 x + [ 1 x ^ 2 + 1 x * y + 2 y ^ 2 ] <= 4" in text
    # the cone becomes auxiliary rows and a quadratic row
    assert " cone_u1_def: 1 cone_u1 - 2 y = -1" in text
    assert " cone: [ 1 cone_u0 ^ 2 + 1 cone_u1 ^ 2 - 1 cone_t ^ 2 ] <= 0" in text
    assert " cone_t >= 0" in text
    assert " rot: - 1 t + [ 1 y ^ 2 ] <= 0" in text
    assert " y free" in text
    assert "Generals" not in text
    assert "Binaries\n x\n" in text


def test_lp_text_polyhedral_cones():
    model = ModelIR(name="poly")
    model.add_variable("x", lower=-math.inf)
    model.add_variable("s")
    model.soc.append(
        SocConstraint(
            "l1", rows=(AffineExpr({"x": 1.0}),), rhs=AffineExpr({"s": 1.0}), norm=NormKind.L1
        )
    )
    text = export_model(model, "lp_text")
    assert " l1_p0: 1 x - 1 l1_a0 <= 0" in text
    assert " l1: - 1 s + 1 l1_a0 <= 0" in text


def test_unrepresentable_name():
    model = ModelIR()
    model.add_variable("bad name")
    with pytest.raises(UnrepresentableConstraint):
        export_model(model, "lp_text")
    # JSON has no such restriction
    assert "bad name" in export_model(model, "json")


def test_unknown_format(model):
    with pytest.raises(ModelIRError):
        export_model(model, "mps")
