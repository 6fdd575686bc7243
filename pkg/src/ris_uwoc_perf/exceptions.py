"""Exception hierarchy shared by the evaluation, fitting and sweep layers."""


class RisUwocError(Exception):
    """Base class for every error raised by the package."""


class GammaPoleError(RisUwocError, ValueError):
    """Raised when a gamma function is requested at (or next to) one of its poles."""


class ContourError(RisUwocError):
    """Raised when no vertical contour separates the pole families of an integrand."""


class ConvergenceError(RisUwocError):
    """Raised when a Mellin-Barnes quadrature does not settle within its tolerance."""


class FitError(RisUwocError):
    """Raised when the squared generalized-K moment system has no usable root."""


class UnknownConditionError(RisUwocError, KeyError):
    """Raised when a water condition is not present in the embedded tables."""


class ProbabilityRangeError(RisUwocError):
    """Raised when a computed probability leaves [0, 1] by more than the numerical slack."""


class SpecValidationError(RisUwocError, ValueError):
    """Raised when a sweep specification is invalid.

    Parameters
    ----------
    field : str
        Dotted path of the offending field, e.g. ``sweep.fig2.points``.
    message : str
        Human readable reason.
    """

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")
