import pytest

from socvexify import ConfigError, Tolerances, get_tolerances, set_tolerances
from socvexify import tolerances_from_environment


def test_default_tolerances():
    t = Tolerances()
    assert t.feasibility == 1e-7
    assert t.equality == 1e-6
    assert t.radicand_clamp == 1e-9
    assert t.rank == 1e-10
    assert t.pivot == 1e-10
    assert t.support == 1e-9


def test_from_base():
    t = Tolerances.from_base(1e-5)
    assert t.feasibility == 1e-5
    assert t.equality == pytest.approx(1e-4)
    # untouched fields keep their defaults
    assert t.pivot == 1e-10


def test_nonpositive_tolerance():
    with pytest.raises(ConfigError):
        Tolerances(feasibility=0.0)
    with pytest.raises(ConfigError):
        Tolerances.from_base(-1.0)


def test_set_tolerances_returns_previous():
    custom = Tolerances.from_base(1e-6)
    previous = set_tolerances(custom)
    assert previous == Tolerances()
    assert get_tolerances() is custom


def test_tolerances_from_environment(monkeypatch):
    monkeypatch.delenv("SOCVEXIFY_TOL", raising=False)
    assert tolerances_from_environment() == Tolerances()
    monkeypatch.setenv("SOCVEXIFY_TOL", "1e-6")
    assert tolerances_from_environment().feasibility == 1e-6
    # an explicit value wins over the environment
    assert tolerances_from_environment(1e-4).feasibility == 1e-4
    monkeypatch.setenv("SOCVEXIFY_TOL", "small")
    with pytest.raises(ConfigError):
        tolerances_from_environment()
