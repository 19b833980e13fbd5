"""Exception taxonomy shared across the package.

Every failure mode that callers are expected to branch on gets its own
class here.  ``exit_code`` is what the command line front end maps the
exception to: 2 for configuration and input validation problems, 3 for
tolerance or contract failures detected in otherwise well-posed runs,
4 for optimizer breakdowns.
"""

from __future__ import annotations


class PlpotError(Exception):
    """Base class for all package-specific errors."""

    exit_code = 1


class ConfigError(PlpotError):
    """Malformed configuration, file, or argument set."""

    exit_code = 2


class DegenerateBody(ConfigError):
    """Vertex set does not span a full-dimensional body."""


class NegativeCoordinate(ConfigError):
    """A vertex coordinate is negative; bodies live in the closed positive orthant."""


class UnknownGenerator(ConfigError):
    """Sample-set generator name not recognized."""


class EmptyEffectiveSample(ConfigError):
    """No sample point carries a finite weight, so every constraint is vacuous."""


class ConstantPolynomial(PlpotError):
    """Degree query on a polynomial whose support is only the origin."""

    exit_code = 2


class Unreachable(PlpotError):
    """Support point violates a through-origin half-space, so no dilate contains it."""

    exit_code = 2


class UnboundedLevelSet(PlpotError):
    """Requested level is at or below the global minimum of the indicator."""

    exit_code = 2


class ToleranceFailure(PlpotError):
    """Base for failures where a computed certificate exceeds its budget."""

    exit_code = 3


class NotMonotone(ToleranceFailure):
    """Weight sequence fed to the monotone-limit routine is not nondecreasing."""


class NonFiniteSample(ToleranceFailure):
    """Integrand returned NaN or infinity at a quadrature node."""


class QuadratureTooCoarse(ToleranceFailure):
    """Certified quadrature error is too large for the quantity being resolved."""


class ContractViolation(ToleranceFailure):
    """A regularization output breaks one of its structural guarantees."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        msg = f"contract clause {clause} violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ToleranceExceeded(ToleranceFailure):
    """Two independent evaluations of the same quantity disagree beyond budget."""


class SolverFailure(PlpotError):
    """Base for optimizer breakdowns."""

    exit_code = 4


class SolverStall(SolverFailure):
    """Conic solver stopped with a certified gap above the requested tolerance."""


class Unbounded(SolverFailure):
    """The sampled constraint set leaves a polynomial direction unconstrained."""
