"""Exception hierarchy shared by every module."""


class HairyCantorError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HairyCantorError, ValueError):
    """An argument lies outside the set where the operation is defined."""


class AddressError(DomainError):
    """An address has the wrong length or an entry out of range."""


class ContractError(HairyCantorError, ValueError):
    """A caller-supplied object violates a documented precondition."""


class ResourceError(HairyCantorError):
    """The finite model is too small (or would be too large) for the request."""


class MatchingError(ResourceError):
    """The matched-nest construction could not realise a cut at this depth."""

    def __init__(self, message, level=None, target=None):
        super().__init__(message)
        self.level = level
        self.target = target
