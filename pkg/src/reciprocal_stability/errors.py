"""Exception hierarchy shared by every module of the package."""


class StabilityError(Exception):
    """Base class for all package errors."""


class DomainError(StabilityError):
    """A point function was evaluated outside its domain."""


class DegenerateDenominator(StabilityError):
    """The functional equation is undefined at the requested pair."""


class InvalidParameter(StabilityError, ValueError):
    pass


class ZeroToNegativePower(StabilityError, ZeroDivisionError):
    pass


class MuUndefined(StabilityError):
    """A control function cannot be evaluated at the requested pair."""


class LimitMissing(StabilityError):
    pass


class AlreadyPerturbed(StabilityError):
    pass


class ConfigError(StabilityError):
    pass
