"""Exception types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument is outside the operation's documented domain."""


class StructureError(ValueError):
    """A graph or clustering violates a structural precondition."""


class InputError(ValueError):
    """A problem instance violates the algorithm's input requirements."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class BudgetError(RuntimeError):
    """A randomness source ran out of bits (or a node drew bits it does not own)."""


class ContractViolation(RuntimeError):
    """A checker broke its declared round contract."""


class SimTimeout(RuntimeError):
    """The round cap was hit while some nodes were still running.

    The partial trace is attached as ``trace``.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
