"""Exception types shared by every module of the package."""


class BoseMIError(Exception):
    """Base class for all errors raised by bose_mi."""


class DomainError(BoseMIError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PartitionError(DomainError):
    """A bipartition ``(L_A, L)`` is not admissible."""


class PositivityError(BoseMIError, ArithmeticError):
    """A correlation matrix has an eigenvalue clearly below zero."""


class TailMassError(DomainError):
    """A truncated distribution drops more probability than allowed."""


class ClassificationError(DomainError):
    """Parameters do not fall into exactly one asymptotic regime."""


class InsufficientDataError(BoseMIError, ValueError):
    """Too few points to perform a fit."""


class ConvergenceError(BoseMIError, ArithmeticError):
    """An iterative procedure failed to reach its tolerance.

    ``estimate`` carries the last available value, if any.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ModeIndexError(BoseMIError, IndexError):
    """A momentum index lies outside ``0 .. L-1``."""
