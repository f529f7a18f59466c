"""Exception types shared across the toolkit."""


class FewNError(Exception):
    """Base class for all toolkit errors."""


class DomainError(FewNError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(DomainError):
    """The function does not change sign on the supplied bracket."""


class InsufficientDataError(FewNError, ValueError):
    """Too few observations for the requested test."""


class DegenerateSampleError(FewNError, ValueError):
    """All differences are identical, so the standard deviation is zero."""


class ContractError(FewNError, ValueError):
    """The call violates a usage contract (e.g. conjunction without a direction)."""
