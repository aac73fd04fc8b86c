"""Exception types raised across the package."""


class BpsRhError(Exception):
    """Base class for all package errors."""


class PoleError(BpsRhError, ValueError):
    """Argument sits on (or within tolerance of) a pole.

    ``index`` is the non-negative integer n with the argument equal to -n.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class BranchCutError(BpsRhError, ValueError):
    pass


class ZeroArgumentError(BpsRhError, ValueError):
    pass


class DomainError(BpsRhError, ValueError):
    pass


class ToleranceError(BpsRhError, ArithmeticError):
    pass


class ActiveRayError(BpsRhError, ValueError):
    pass


class SFactorZeroError(BpsRhError, ArithmeticError):
    pass


class CriticalPointError(BpsRhError, ValueError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SectorError(BpsRhError, ValueError):
    pass


class HypothesisError(BpsRhError, ValueError):
    pass


class ParseError(BpsRhError, ValueError):
    """Malformed input file."""
