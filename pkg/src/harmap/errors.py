"""Shared exception types."""


class HarmapError(Exception):
    """Base class for package-specific failures."""


class DomainError(HarmapError, ValueError):
    """Input outside the mathematical domain of an operation."""


class RadiusError(DomainError):
    """Evaluation point too close to (or beyond) the unit circle."""


class WeightError(DomainError):
    """Atom weights violate the constraints of the requested family."""


class ConvergenceError(HarmapError, RuntimeError):
    """An adaptive numerical routine failed to stabilize."""


class DegenerateValueError(HarmapError, ArithmeticError):
    """A quantity required to stay away from zero vanished on the grid."""


class CurveDistanceError(HarmapError, RuntimeError):
    """Sampled curve passes too close to a probe target for a reliable winding count."""


class AmbiguousWindingError(HarmapError, RuntimeError):
    """Accumulated argument is too far from an integer multiple of 2*pi."""


class PreconditionError(HarmapError, ValueError):
    """A documented hypothesis of a check is not satisfied by the input."""


class UnknownBuiltinError(HarmapError, KeyError):
    """Requested builtin function name is not registered."""
