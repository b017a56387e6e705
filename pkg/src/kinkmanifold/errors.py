"""Exception hierarchy shared by the library and the command line.

Validation problems (bad parameters, out-of-range inputs) map to exit
status 1 in the CLI; numerical failures map to exit status 2.
"""

from __future__ import annotations


class KinkError(Exception):
    """Base class for all library errors."""


class ValidationError(KinkError, ValueError):
    """Input outside the documented domain."""


class DomainError(ValidationError):
    """A coordinate lies outside the range where a formula is defined."""


class UnsupportedRegimeError(ValidationError):
    """The requested operation is not defined for the parameter regime."""


class NumericalError(KinkError, ArithmeticError):
    """A computation failed for numerical reasons."""


class SingularChartError(NumericalError):
    """Evaluation on a face or edge where the elliptic chart degenerates."""


class ConditioningError(NumericalError):
    """Root ordering or clamping failed beyond tolerance."""


class IntegrationError(NumericalError):
    """The flow integrator could not complete a trajectory."""


class IncompleteTrajectoryError(ValidationError):
    """A trajectory does not connect two vacua."""
