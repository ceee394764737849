"""Exception hierarchy shared by all modules."""

from __future__ import annotations

from .algebra import BudgetExceeded  # noqa: F401  (re-exported)


class CircuitError(Exception):
    pass


class ParseError(CircuitError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(CircuitError):
    pass


class InconsistentCircuit(CircuitError):
    """A division by the zero rational function."""

    def __init__(self, node_id: int, detail: str = ""):
        self.node_id = node_id
        super().__init__(f"inconsistent circuit: division by zero function at node {node_id}" + (f" ({detail})" if detail else ""))


class DivisionByZero(CircuitError):
    """A denominator vanishes at a particular point (the function may be fine elsewhere)."""

    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__(f"division by zero at node {node_id}")


class NotPolynomialInInputs(CircuitError):
    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__(f"final result at node {node_id} has an input variable in its denominator")


class ArityMismatch(CircuitError):
    pass


class UnsupportedFamily(Exception):
    pass


class CrossCheckFailed(AssertionError):
    """Two independent computations of the same quantity disagree."""
