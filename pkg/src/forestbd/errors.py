"""Exception types shared across the package."""


class ForestBDError(Exception):
    """Base class for all errors raised by this package."""


class DimacsError(ForestBDError, ValueError):
    """Malformed DIMACS CNF input."""


class ContractError(ForestBDError, ValueError):
    """An operation was called with arguments violating its precondition."""


class CyclicInputError(ContractError):
    """A formula with a cyclic incidence graph reached an operation that
    only accepts acyclic input."""


class ResourceLimitError(ForestBDError, RuntimeError):
    """A request exceeded a hard resource guard; raised instead of hanging."""
