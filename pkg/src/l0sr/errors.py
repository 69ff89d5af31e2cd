"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array shapes are inconsistent with an operation."""


class ConfigurationError(ValueError):
    """A parameter or configuration value is invalid."""


class NumericalError(ArithmeticError):
    """A solver produced non-finite values.

    ``iteration`` holds the outer iteration index at which it happened,
    or ``None`` when not applicable.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ImageFormatError(ValueError):
    """Unsupported or malformed image file."""


class TruncatedImageError(ImageFormatError):
    """Image file ends before its declared payload."""
