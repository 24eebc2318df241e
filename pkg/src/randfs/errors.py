"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class SizeError(DomainError):
    """An input is too large for exhaustive enumeration."""


class ResourceError(RuntimeError):
    """A memory or big-integer budget would be exceeded."""
