"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid or infeasible configuration (bad scheme parameters, malformed
    experiment file, unknown keys). Maps to CLI exit code 2."""
