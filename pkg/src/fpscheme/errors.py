"""Exception hierarchy shared by the package."""


class FixedPointError(Exception):
    """Base class for all errors raised by fpscheme."""


class InvalidInputError(FixedPointError, ValueError):
    """Malformed point, dimension mismatch, or bad argument."""


class DomainViolationError(FixedPointError, ValueError):
    """A point fell outside the domain of a mapping."""


class InvalidParameterError(FixedPointError, ValueError):
    """A scheme coefficient left the open interval (0, 1)."""


class InvalidSpecError(FixedPointError, ValueError):
    """A scheme specification is missing a required coefficient sequence."""


class UnsupportedNormError(FixedPointError, ValueError):
    pass


class UnsupportedMapError(FixedPointError, ValueError):
    pass


class DataFormatError(FixedPointError, ValueError):
    """A data file could not be parsed; ``lineno`` points at the offending line."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ConfigError(FixedPointError, ValueError):
    """Configuration validation failed; ``problems`` lists every violation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))
