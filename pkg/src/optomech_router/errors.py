"""Exception hierarchy shared by all modules.

Validation problems derive from :class:`ValidationError` (also a ``ValueError``),
numerical failures from :class:`NumericalError`.  The CLI maps the two families
onto exit codes 1 and 2.
"""


class RouterError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RouterError, ValueError):
    """Bad user input: parameters, configuration, preconditions."""


class InvalidParameter(ValidationError):
    pass


class ConfigError(ValidationError):
    """Configuration-file problem, optionally tied to a line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ConfigError):
    pass


class MissingKey(ConfigError):
    def __init__(self, keys):
        self.keys = list(keys)
        super().__init__("missing required keys: " + ", ".join(self.keys))


class UnparsableValue(ConfigError):
    pass


class NumericalError(RouterError):
    """A computation could not produce a trustworthy result."""


class NonConvergence(NumericalError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class Multistability(NumericalError):
    def __init__(self, message, fixed_points=()):
        self.fixed_points = list(fixed_points)
        super().__init__(message)


class NotAttainable(NumericalError):
    pass


class StepSizeTooLarge(NumericalError):
    pass


class ComplexCharPoly(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class UnstableSystem(NumericalError):
    pass
