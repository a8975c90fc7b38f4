"""Exception hierarchy for the lab."""


class LabError(Exception):
    """Base class for all errors raised by :mod:`lozenge_lab`."""


class DomainError(LabError, ValueError):
    """Malformed domain: not simply connected, empty, bad sides."""


class UntileableDomainError(DomainError):
    """The domain admits no perfect matching."""


class MatchingError(LabError, ValueError):
    """A dimer configuration is not a perfect matching of its domain."""


class CapExceededError(LabError):
    """An enumeration produced more objects than its cap."""


class ConditioningError(LabError, ValueError):
    """The frozen part of a conditional measure has no completion."""


class GeometryError(LabError, ValueError):
    """Curve or point violates a geometric precondition."""


class TraceError(LabError, ValueError):
    """A walk cannot be decomposed into scale crossings."""


class ConfigError(LabError, ValueError):
    """Invalid experiment configuration."""
