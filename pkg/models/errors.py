"""
Exception hierarchy for the numerical engines.
Every failure raised by the models carries enough context to be reported
by the command line without a traceback.
"""

from typing import Optional


class RcmError(Exception):
    """Base class for all engine errors"""
    pass


class ParameterError(RcmError, ValueError):
    """A scalar parameter lies outside its admissible range"""
    pass


class PreconditionError(RcmError):
    """A strip or domain membership precondition is violated"""
    pass


class DimensionError(RcmError, ValueError):
    """A vector argument has the wrong length"""
    pass


class InputError(RcmError, ValueError):
    """Non-finite or malformed numerical input"""
    pass


class SingularityError(RcmError):
    """Evaluation too close to a pole or zero of a factor

    Attributes:
        location: Argument at which evaluation was attempted
        nearest: Nearest lattice point of the offending set
        factor: Human readable label of the factor that is singular
    """

    def __init__(self, message: str, location: Optional[complex] = None,
                 nearest: Optional[complex] = None, factor: Optional[str] = None):
        super().__init__(message)
        self.location = location
        self.nearest = nearest
        self.factor = factor

    def annotate(self, factor: str) -> "SingularityError":
        """Return a copy whose message names the enclosing factor"""
        return SingularityError(f"{factor}: {self}", self.location, self.nearest, factor)


class ContinuationError(RcmError):
    """Analytic continuation needed more difference-equation steps than allowed"""
    pass


class QuadratureError(RcmError):
    """Integrand produced a non-finite value at a quadrature node"""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class ContourError(RcmError):
    """A shifted contour comes too close to a pole band"""
    pass


class DegenerateFitError(RcmError):
    """All samples of a fit sit at the numerical floor"""
    pass


class UnknownClaimError(RcmError, KeyError):
    """Envelope claim id is not registered"""
    pass


class AccuracyWarning(UserWarning):
    """Error estimate exceeds the requested tolerance"""
    pass
