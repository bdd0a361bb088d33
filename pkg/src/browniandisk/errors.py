"""Semantic exception hierarchy shared by all modules."""


class ParameterError(ValueError):
    """A caller-supplied parameter violates a precondition."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ResourceLimitError(RuntimeError):
    """A configured resource cap (points, memory) would be exceeded."""
