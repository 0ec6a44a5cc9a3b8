"""Exception types shared across the package."""


class BeamestError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(BeamestError, ValueError):
    """Matrix or array-geometry dimensions are inconsistent or out of range."""


class OversamplingError(InvalidDimensionError):
    """Angle grid is finer than the antenna count allows (k < n)."""


class AngleDomainError(BeamestError, ValueError):
    """Normalized angle lies outside [-1, 1]."""


class DivisibilityError(BeamestError, ValueError):
    """A scattered diagonal layout requires the active count to divide the dimension."""


class MetricError(BeamestError, ValueError):
    """A metric was requested on empty or mismatched inputs."""


class ConfigValidationError(BeamestError, ValueError):
    """Simulation configuration violates one or more constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration: " + "; ".join(self.violations))
