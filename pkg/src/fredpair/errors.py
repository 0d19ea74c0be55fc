"""Exception hierarchy shared by all fredpair modules."""


class FredpairError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(FredpairError, ValueError):
    """Raised when an argument is invalid (shapes, dimensions, mismatched spaces)."""


class RangeError(ArgumentError):
    """Raised when a cut leaves its Fourier window."""


class WindowError(ArgumentError):
    """Raised when a window is too small for the band structure of a symbol."""


class SymbolNotInvertibleError(FredpairError):
    """Raised when a symbol fails its invertibility certificate."""


class ConvergenceError(FredpairError):
    """Raised when a refinement loop did not settle."""


class NoTransitionError(FredpairError):
    """Raised when the projector formula for a transition automorphism is singular."""


class GeometryError(FredpairError):
    """Raised for overlapping disks or expansions on a circle through a pole."""


class CalibrationError(FredpairError):
    """Raised when the convention calibration has no or several solutions."""


class InconsistencyError(FredpairError):
    """Raised when independent index routes disagree.

    The full report is kept on ``report`` so the caller can print it.
    """

    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report
