"""Exception types raised across the package."""


class RobustSubError(Exception):
    """Base class for all package errors."""


class KernelDomainError(RobustSubError, ValueError):
    pass


class PatternError(RobustSubError, ValueError):
    pass


class NotConnected(PatternError):
    pass


class NotSimple(PatternError):
    pass


class VertexOutOfRange(PatternError):
    pass


class Infeasible(RobustSubError, ValueError):
    """MAD too large for the given mean and support range.

    ``max_mad`` carries the largest feasible MAD so callers can report it.
    """

    def __init__(self, message, max_mad=None):
        super().__init__(message)
        self.max_mad = max_mad


class GridInfeasible(RobustSubError, ValueError):
    pass


class ExponentUnsupported(RobustSubError, ValueError):
    pass


class ExponentOutOfRange(RobustSubError, ValueError):
    pass


class RegimeViolation(RobustSubError, ValueError):
    pass


class PreconditionViolated(RobustSubError, ValueError):
    pass


class TooLarge(RobustSubError, ValueError):
    pass


class PatternTooLarge(TooLarge):
    pass


class EmptyGraph(RobustSubError, ValueError):
    pass


class RegimeWarning(UserWarning):
    """An asymptotic formula is being evaluated outside its regime."""
