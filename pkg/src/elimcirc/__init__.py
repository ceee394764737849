"""Parameterized arithmetic circuits over exact rationals, elimination polynomial
families, lower-bound witnesses and falling-factorial chain verification."""

__version__ = "0.1.0"

from .algebra import P, Poly, RatFunc, parse_poly, render_poly
from .circuit import Circuit, CircuitBuilder, metrics, parse_circuit, render_circuit
from .semantics import interpret

__all__ = [
    "P",
    "Poly",
    "RatFunc",
    "parse_poly",
    "render_poly",
    "Circuit",
    "CircuitBuilder",
    "metrics",
    "parse_circuit",
    "render_circuit",
    "interpret",
]
