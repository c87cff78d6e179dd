"""Exception types shared across the package."""


class SirswitchError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(SirswitchError, ValueError):
    """A model parameter, seed, or run setting violates a precondition."""


class NumericalInstabilityError(SirswitchError, ArithmeticError):
    """An integrated trajectory left the physical domain beyond tolerance."""


class NotApplicableError(SirswitchError, ValueError):
    """A construction was requested outside its regime of validity."""


class UnresolvedThresholdError(SirswitchError, ArithmeticError):
    """The persistence threshold is numerically indistinguishable from zero."""
