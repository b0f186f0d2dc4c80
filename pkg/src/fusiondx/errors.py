"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes (bad config -> 2, missing artifact -> 3,
numerical failure -> 4), so raise the most specific class available.
"""


class FusionDxError(Exception):
    """Base class for all package errors."""


class GraphError(FusionDxError):
    """Invalid graph structure, shape mismatch, or misuse of forward/backward."""


class DataError(FusionDxError):
    """Malformed or out-of-contract input data."""


class ConfigError(FusionDxError):
    """Invalid or inconsistent configuration."""


class MissingArtifactError(FusionDxError):
    """A pipeline stage input artifact does not exist."""


class NumericalError(FusionDxError):
    """Non-finite values where finite ones are required."""
