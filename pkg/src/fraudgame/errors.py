"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """A pure-regime object was requested where the mixed regime applies,
    or vice versa."""
