"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point or parameter violates a geometric domain constraint."""


class ConfigError(ValueError):
    """An operation was configured outside its admissible parameter range."""


class SolverError(RuntimeError):
    """A numerical solve failed to converge or produced an inconsistent result."""
