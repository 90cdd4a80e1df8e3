"""Exception hierarchy shared by every hcmdesign module."""


class HcmError(Exception):
    """Base class for all hcmdesign errors."""


class ValidationError(HcmError, ValueError):
    """An input violates a documented invariant.

    ``field`` names the offending parameter (dotted path for catalog entries)
    when one can be identified.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(ValidationError):
    """A numeric argument lies outside the domain of a function."""


class NumericError(HcmError, ArithmeticError):
    """A numeric routine failed to produce a result within tolerance."""


class ConvergenceError(NumericError):
    """Iteration or refinement budget exhausted before meeting tolerance."""


class NoSignChangeError(NumericError):
    """No root could be bracketed in the requested interval."""


class DegenerateShapeError(NumericError):
    """The mode shape produces zero actuation displacement (A1 = 0 or L1 = 0)."""


class CatalogError(ValidationError):
    """Malformed or inconsistent catalog document."""

    def __init__(self, message, field=None, line=None, column=None):
        super().__init__(message, field=field)
        self.line = line
        self.column = column
