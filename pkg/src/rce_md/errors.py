"""Exception hierarchy.

Every error class carries an ``exit_code`` so the command-line front end can
map failures to distinct process exit statuses.
"""


class RCEError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class AliasingError(RCEError):
    exit_code = 10


class IndexOutOfOmega(RCEError, IndexError):
    exit_code = 11


class GridMismatch(RCEError):
    exit_code = 12


class InsufficientData(RCEError):
    exit_code = 20


class DegenerateData(RCEError):
    exit_code = 21


class NotPositiveDefinite(RCEError):
    exit_code = 22


class InfeasiblePoint(RCEError):
    """Raised when Q(theta) <= 0 at some quadrature node."""

    exit_code = 30


class InfeasibleStart(InfeasiblePoint):
    exit_code = 31


class MaxIterations(RCEError):
    """Optimizer ran out of iterations.

    The best iterate is attached as ``report`` so callers can still inspect
    the residual.
    """

    exit_code = 32

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonPositiveDensity(RCEError):
    exit_code = 40


class NotNormalized(RCEError):
    exit_code = 41


class NegativeGap(RCEError, ValueError):
    exit_code = 42


class UnstableFilter(RCEError):
    exit_code = 50


class NotSolved(RCEError):
    exit_code = 60


class FormatError(RCEError):
    exit_code = 70
