"""Exception hierarchy shared by every phasekit module."""


class PhasekitError(Exception):
    """Base class for all library errors."""


class NonSquareError(PhasekitError, ValueError):
    pass


class NonFiniteError(PhasekitError, ValueError):
    pass


class NoConvergenceError(PhasekitError, ArithmeticError):
    pass


class SingularMatrixError(PhasekitError, ArithmeticError):
    pass


class NotPositiveDefiniteError(PhasekitError, ArithmeticError):
    pass


class LengthMismatchError(PhasekitError, ValueError):
    pass


class NonPositiveEntryError(PhasekitError, ValueError):
    pass


class ZeroMatrixError(PhasekitError, ValueError):
    pass


class NotSectorialError(PhasekitError, ValueError):
    """Raised when an operation needs 0 outside the numerical range."""


class BranchError(PhasekitError, ValueError):
    """A requested phase interval cannot hold the phases."""


class BranchAmbiguityError(PhasekitError, ArithmeticError):
    """An eigenvalue sits on the branch cut of the product-phase interval."""


class NotRealError(PhasekitError, ValueError):
    pass


class BadOrderError(PhasekitError, ValueError):
    pass


class RankDeficientError(PhasekitError, ValueError):
    pass


class DefectiveEigenvectorsError(PhasekitError, ArithmeticError):
    pass


class SpreadTooWideError(PhasekitError, ValueError):
    pass


class PhasesOutOfRangeError(PhasekitError, ValueError):
    pass


class InfeasibleAlphaError(PhasekitError, ValueError):
    pass


class DegenerateConeError(PhasekitError, ValueError):
    pass


class NotInConeError(PhasekitError, ValueError):
    pass


class NotBandedError(PhasekitError, ValueError):
    pass


class RangeConditionError(PhasekitError, ArithmeticError):
    pass


class InfeasibleWindowError(PhasekitError, ValueError):
    """A (p+1)-block principal window is outside the target cone."""

    def __init__(self, window, lower_phase=None, upper_phase=None, message=None):
        self.window = window
        self.lower_phase = lower_phase
        self.upper_phase = upper_phase
        if message is None:
            message = f"window {window} is not in the target cone"
            if lower_phase is not None and upper_phase is not None:
                message += f" (phases in [{lower_phase:.6g}, {upper_phase:.6g}])"
        super().__init__(message)
