class DomainError(ValueError):
    """A time or argument outside the domain of an operation."""


class ConfigError(ValueError):
    """Invalid scenario, integrand or experiment configuration."""
