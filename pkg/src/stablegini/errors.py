"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to
distinct process exit statuses without inspecting messages.
"""


class StableGiniError(Exception):
    exit_code = 1


class InputFileError(StableGiniError, OSError):
    """Input file missing or unreadable."""

    exit_code = 3


class DataError(StableGiniError, ValueError):
    """Input data failed to parse into a valid sample."""

    exit_code = 4


class DomainError(StableGiniError, ValueError):
    """A parameter lies outside the domain where the method is defined."""

    exit_code = 5


class ModelViolation(DomainError):
    """Data inconsistent with the assumed model, e.g. a value below the known minimum."""

    exit_code = 6


class NumericalError(StableGiniError, ArithmeticError):
    """Quadrature, optimizer or root search failed to reach its tolerance."""

    exit_code = 7
