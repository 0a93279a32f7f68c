"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class FormatError(ValueError):
    """A volume file is malformed or inconsistent with its header."""


class ContractError(RuntimeError):
    """An operation was invoked in a state or configuration it does not support."""
