import os

import numpy as np
import pytest

from socvexify import (
    BinaryDomain,
    ConicSet,
    ConicSetError,
    NormKind,
    SqrtQuadraticRhs,
    TableRhs,
    YBox,
    validate,
)


def test_properties(disc_set):
    assert (disc_set.n, disc_set.m, disc_set.p) == (1, 1, 2)
    assert disc_set.theorem_preconditions
    assert np.allclose(disc_set.f_values(), np.sqrt(2))
    assert disc_set.affine_part([1], [2]).tolist() == [1.0, 2.0]
    assert validate(disc_set) == []


def test_matrices_are_read_only(disc_set):
    with pytest.raises(ValueError):
        disc_set.A[0, 0] = 5.0


# data for test_validate_problems
def _broken_sets():
    domain = BinaryDomain.full_cube(1)
    f = TableRhs(values=(1, 1))
    return [
        (ConicSet(domain, A=np.ones((3, 1)), B=np.ones((2, 1)), d=np.zeros(2), f=f), "A is"),
        (ConicSet(domain, A=np.ones((2, 1)), B=np.ones((3, 1)), d=np.zeros(2), f=f), "B has"),
        (
            ConicSet(domain, A=np.ones((2, 1)), B=np.ones((2, 1)), d=[np.nan, 0], f=f),
            "non-finite",
        ),
        (
            ConicSet(domain, A=np.ones((2, 1)), B=np.ones((2, 1)), d=np.zeros(2), f=TableRhs((1,))),
            "1 values",
        ),
        (
            ConicSet(
                domain,
                A=np.ones((2, 1)),
                B=np.ones((2, 1)),
                d=np.zeros(2),
                f=f,
                y_box=YBox(lower=[1.0], upper=[0.0]),
            ),
            "y_box",
        ),
    ]


@pytest.mark.parametrize("conic_set, expected", _broken_sets())
def test_validate_problems(conic_set, expected):
    messages = conic_set.validate()
    assert any(expected in message for message in messages)


def test_y_box_violation():
    box = YBox(lower=[0.0, -np.inf], upper=[np.inf, 1.0])
    assert box.violation([1.0, 0.0]) == 0.0
    assert box.violation([-0.5, 2.0]) == pytest.approx(1.5)


def test_json_round_trip():
    conic_set = ConicSet(
        domain=BinaryDomain.full_cube(2),
        A=[[1.0, 2.0], [0.0, 1.0]],
        B=[[1.0], [3.0]],
        d=[0.5, -0.5],
        f=SqrtQuadraticRhs(P=np.eye(2), r=[1.0, 1.0], s=2.0),
        norm=NormKind.LINF,
        y_box=YBox(lower=[0.0], upper=[np.inf]),
    )
    text = conic_set.to_json()
    assert '"inf"' in text
    assert ConicSet.from_json(text) == conic_set


def test_from_json_errors():
    with pytest.raises(ConicSetError):
        ConicSet.from_json("not json")
    with pytest.raises(ConicSetError):
        ConicSet.from_json('{"n": 1}')


def test_from_file(tmp_path, disc_set):
    with pytest.raises(ConicSetError):
        ConicSet.from_file("non-existing-file")
    file_name = os.path.join(tmp_path, "set.json")
    with open(file_name, "w") as f:
        f.write(disc_set.to_json())
    assert ConicSet.from_file(file_name) == disc_set
