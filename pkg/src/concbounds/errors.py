class DimensionError(ValueError):
    """Matrix side and subsystem dimensions disagree."""


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class InsufficientDataError(ValueError):
    """Normalization counts are non-positive, so no ratio can be formed."""


class ConfigError(ValueError):
    """Scenario configuration failed to parse or validate."""
