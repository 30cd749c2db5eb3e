"""Exception hierarchy shared by every module."""


class TailBoundError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TailBoundError, ValueError):
    """An argument lies outside the domain of the operation."""


class SideMismatch(DomainError):
    """The ratio lambda sits on the wrong side of 1 for the requested tail."""


class PreconditionError(DomainError):
    """A stated precondition of a bound (other than the tail side) fails."""


class BudgetExceeded(TailBoundError):
    """An exact computation would exceed its documented work cap."""


class NonConvergence(TailBoundError):
    """An iterative search hit its iteration cap."""
