"""Exception types shared across the package.

``ConfigError`` subclasses map to CLI exit code 2, everything else
derived from ``AoiGrrError`` maps to exit code 3.
"""


class AoiGrrError(Exception):
    """Base class for all package errors."""


class ConfigError(AoiGrrError):
    """Invalid user-supplied configuration."""


class EmptyGroups(ConfigError):
    pass


class NonPositiveParameter(ConfigError):
    pass


class DuplicateOrDecreasingD(ConfigError):
    pass


class ThetaOutOfDomain(AoiGrrError):
    """logmgf evaluated outside [0, theta_max)."""


class EmptyFeasibleSet(AoiGrrError):
    """A theta constraint excludes every theta > 0."""


class StabilityViolated(AoiGrrError):
    """No exponential tilt keeps per-iteration work below the iteration budget."""


class WrongLaw(AoiGrrError):
    """An operation requires a specific service-time law."""


class KTooSmall(AoiGrrError):
    """Update index below the smallest one the quantity is defined for."""


class SourceNotServedInRound(AoiGrrError):
    """Internal consistency failure while walking the schedule."""


class HorizonTooShort(AoiGrrError):
    """Simulation horizon produced no complete record for a requested source."""


class ScanCapExceeded(AoiGrrError):
    """The running minimum over l' was still decreasing at the scan cap."""
