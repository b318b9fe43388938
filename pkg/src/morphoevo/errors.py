"""Exception types shared across the package."""


class MorphoevoError(Exception):
    """Base class for all package errors."""


class ConfigError(MorphoevoError):
    """Invalid or infeasible configuration (bad counts, fractions, alpha...)."""


class SchemaError(MorphoevoError):
    """Malformed config file: unknown keys, wrong types, missing fields."""
