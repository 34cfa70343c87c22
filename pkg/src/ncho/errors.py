"""Exception hierarchy.

DomainError covers rejected inputs (CLI exit code 2); NumericalError covers
internal iteration or budget failures (exit code 1).
"""


class NchoError(Exception):
    pass


class DomainError(NchoError):
    pass


class NumericalError(NchoError):
    pass


class NotHermitian(DomainError):
    pass


class NotPositiveDefinite(DomainError):
    pass


class NonPositiveAlpha(DomainError):
    pass


class ZeroDimension(DomainError):
    pass


class NotCommutative(DomainError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class TruncationBudgetExceeded(NumericalError):
    pass


class SingularDenominator(DomainError):
    pass


class OffManifold(DomainError):
    pass


class InconsistentSystem(NumericalError):
    pass


class OutsideRegion(DomainError):
    pass


class OutOfInterval(DomainError):
    pass


class InfeasibleFamilyPoint(DomainError):
    pass


class RootNotFound(DomainError):
    pass


class SingularEncountered(DomainError):
    pass


class GridBudgetExceeded(DomainError):
    pass


class ParseError(DomainError):
    pass


class DegenerateRoots(UserWarning):
    """Warning: the two squared frequencies collide (flagged, not fatal)."""


class CommutativeInput(UserWarning):
    """Warning: closed-form machinery invoked on a commuting pair."""
