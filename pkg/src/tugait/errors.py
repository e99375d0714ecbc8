"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: configuration/validation/ingestion
problems are "the inputs are wrong" (exit 2); per-subject processing
failures are collected and reported together (exit 3).
"""


class TugaitError(Exception):
    """Base class for all package-specific errors."""


class IngestionError(TugaitError):
    """Raw input could not be loaded or failed basic sanity checks."""


class ConfigurationError(TugaitError):
    """A parameter or config file is invalid or out of range."""


class ValidationError(TugaitError):
    """User-supplied structured data violates a documented contract."""


class FeatureError(TugaitError):
    """A feature is undefined for the given input (e.g. no usable peaks)."""
