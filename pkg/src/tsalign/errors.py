"""Exception hierarchy shared across the package."""


class AlignmentError(Exception):
    """Base class for every error raised by this library."""


class ConfigError(AlignmentError):
    """Invalid configuration, parameter combination, or unusable tuning input."""


class DataError(AlignmentError):
    """Malformed or internally inconsistent input data."""


class StructuralError(AlignmentError):
    """Objects combined across incompatible tables, or indices out of range."""


class SizeError(AlignmentError):
    """An enumeration guard was exceeded; use an approximate strategy instead."""
