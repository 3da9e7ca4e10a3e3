"""Errors raised across the package."""


class SymfactError(Exception):
    """Base class for package-specific failures."""


class SingularMatrixError(SymfactError):
    """A matrix required to have full rank is rank deficient."""


class DegenerateRowError(SymfactError):
    """A row that must be normalizable is zero and has no usable fallback."""


class NumericError(SymfactError):
    """A solver produced a non-finite quantity."""


class InputDataError(SymfactError):
    """An input file could not be parsed or holds invalid data.

    Carries the file path and the 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
            if line is not None:
                prefix = f"{path}:{line}: "
        super().__init__(prefix + message)


class ConfigError(SymfactError):
    """An experiment configuration is invalid; the message names the field."""
