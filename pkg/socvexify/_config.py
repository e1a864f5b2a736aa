from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace

from socvexify._errors import SocvexifyError

logger = logging.getLogger(__name__)

TOL_ENVIRONMENT_VARIABLE = "SOCVEXIFY_TOL"
DEFAULT_ALPHA = 0.005
DEFAULT_SEED = 0


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module.

    - feasibility: slack accepted on inequality rows, and the BOUNDARY band of verdicts
    - equality: accepted residual of equality rows and certificate reconstruction
    - radicand_clamp: negative radicands above -radicand_clamp are treated as 0
    - rank: relative threshold on diag(R) of a pivoted QR
    - pivot: relative threshold on Cholesky pivots
    - support: smallest weight kept in a Caratheodory support
    """

    feasibility: float = 1e-7
    equality: float = 1e-6
    radicand_clamp: float = 1e-9
    rank: float = 1e-10
    pivot: float = 1e-10
    support: float = 1e-9

    def __post_init__(self):
        for name in ("feasibility", "equality", "radicand_clamp", "rank", "pivot"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"Tolerance {name} has to be positive, got {value}.")

    @classmethod
    def from_base(cls, tol: float) -> Tolerances:
        """Derive all run tolerances from one feasibility tolerance."""
        return replace(cls(), feasibility=tol, equality=10 * tol)


_current = Tolerances()


def get_tolerances() -> Tolerances:
    """Return the tolerances of the current run."""
    return _current


def set_tolerances(tolerances: Tolerances) -> Tolerances:
    """Replace the tolerances of the current run and return the previous ones."""
    global _current
    previous = _current
    _current = tolerances
    logger.debug("tolerances set to %s", tolerances)
    return previous


def tolerances_from_environment(value: float | None = None) -> Tolerances:
    """Resolve the run tolerances: explicit value first, then SOCVEXIFY_TOL, then defaults."""
    if value is None:
        raw = os.environ.get(TOL_ENVIRONMENT_VARIABLE, "").strip()
        if raw == "":
            return Tolerances()
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(
                f"{TOL_ENVIRONMENT_VARIABLE} has to be a number, got {raw!r}."
            )
    return Tolerances.from_base(value)


class ConfigError(SocvexifyError):
    """Custom error for the run configuration."""

    pass
