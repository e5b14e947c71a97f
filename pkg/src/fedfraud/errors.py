"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested operation."""


class DomainError(ValueError):
    """An argument is outside the operation's valid domain."""


class DataError(ValueError):
    """A dataset file could not be parsed or does not match the schema."""


class ConfigError(ValueError):
    """An experiment configuration is invalid."""
