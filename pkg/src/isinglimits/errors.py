"""Exception hierarchy shared by every module.

Scale-related failures (``TooLarge``, ``InfeasibleEnumeration``) derive from
``ScaleError`` so the CLI can map them to their own exit code.
"""


class IsingLimitsError(ValueError):
    """Base class for all validation failures raised by this package."""


class ScaleError(IsingLimitsError):
    """The requested computation exceeds an exact-enumeration guard."""


class TooLarge(ScaleError):
    pass


class InfeasibleEnumeration(ScaleError):
    pass


class EmptyClass(IsingLimitsError):
    pass


class PreconditionViolated(IsingLimitsError):
    pass


class HypothesisViolated(IsingLimitsError):
    pass


class DimensionMismatch(IsingLimitsError):
    pass


class BadSpinValue(IsingLimitsError):
    pass


class EndpointConditioned(IsingLimitsError):
    pass


class EmptyCandidates(IsingLimitsError):
    pass


class InfeasibleConstraints(IsingLimitsError):
    pass


class ConfigError(IsingLimitsError):
    pass
