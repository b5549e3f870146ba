"""Exception hierarchy shared across the package."""


class LegOptError(Exception):
    """Base class for all package errors."""


class InvalidDimsError(LegOptError, ValueError):
    pass


class CalibrationInfeasibleError(LegOptError, ValueError):
    pass


class InvalidDurationError(LegOptError, ValueError):
    pass


class OutOfRangeError(LegOptError, ValueError):
    pass


class EmptyInputError(LegOptError, ValueError):
    pass


class AlignmentError(LegOptError, ValueError):
    pass


class SingularInertiaError(LegOptError, ArithmeticError):
    """Mass matrix lost positive definiteness during integration."""


class InstabilityError(LegOptError, ArithmeticError):
    """Integrated joint rates diverged."""


class ConfigError(LegOptError, ValueError):
    pass
