"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size or memory cap."""


class UnsupportedDistributionError(ValueError):
    """The requested statistic is undefined for the sample's angle type."""
