"""Exception and warning classes raised across the package."""


class NumericalFailure(RuntimeError):
    """Base for failures of a numerical procedure (CLI exit code 4)."""


class ClearanceViolation(NumericalFailure):
    pass


class UnresolvedBranching(NumericalFailure):
    pass


class NonQuantized(NumericalFailure):
    pass


class PunctureHit(NumericalFailure):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class EmptyRegion(ValueError):
    pass


class TangentCrossing(ValueError):
    pass


class AmbiguousBasepoint(ValueError):
    pass


class NotInSubgroup(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class NoConvergence(RuntimeWarning):
    """Emitted when a Newton candidate is dropped."""
