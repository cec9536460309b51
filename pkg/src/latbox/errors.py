"""Exception taxonomy shared by all latbox modules.

Every failure mode that callers are expected to branch on gets its own
class; anything else surfaces as ValueError with a descriptive message.
"""

from __future__ import annotations


class LatboxError(Exception):
    """Base class for all package-specific errors."""


class DegenerateLatticeError(LatboxError):
    """Basis matrix is singular or numerically rank deficient."""


class RhoBelowThresholdError(LatboxError):
    """Search radius does not exceed the Hermite threshold gamma_n^(1/2)."""


class EmptyCandidateSetError(LatboxError):
    """No nonzero lattice vector exists below the requested radius."""


class NotWeaklyAdmissibleError(LatboxError):
    """A product minimum needed by a bound evaluated to zero, so the
    bound is infinite and the lattice family is outside the theory's scope."""


class BudgetExceededError(LatboxError):
    """An enumeration or counting loop hit its node budget.

    partial carries whatever was accumulated before the abort so callers
    can report progress; it is never a trustworthy final answer.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class PrecisionExhaustedError(LatboxError):
    """Continued-fraction or root-finding iteration ran out of the
    working precision's trustworthy digits."""


class AssumptionViolationError(LatboxError):
    """A documented precondition of a bound or construction fails.

    The message names the violated inequality.
    """
