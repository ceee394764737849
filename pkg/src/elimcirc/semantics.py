"""Node-by-node interpretation of circuits as exact rational functions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .algebra import (
    BudgetExceeded,
    Monomial,
    Poly,
    RatFunc,
    Rational,
    grlex_key,
    rat,
)
from .circuit import Circuit, Node
from .errors import DivisionByZero, InconsistentCircuit, NotPolynomialInInputs

DEFAULT_MAX_TERMS = 10**6


def default_param_names(r: int) -> List[str]:
    return [f"U{k}" for k in range(1, r + 1)]


def default_input_names(n: int) -> List[str]:
    return [f"X{i}" for i in range(1, n + 1)]


@dataclass
class Interpretation:
    values: Dict[int, RatFunc]
    finals: List[RatFunc]
    param_names: List[str]
    input_names: List[str]


def _names(c: Circuit, param_names, input_names):
    pn = list(param_names) if param_names is not None else default_param_names(c.r)
    xn = list(input_names) if input_names is not None else default_input_names(c.n)
    if len(pn) < c.r or len(xn) < c.n:
        raise ValueError("not enough variable names for the circuit's parameters/inputs")
    return pn, xn


def interpret(
    c: Circuit,
    param_names: Optional[Sequence[str]] = None,
    input_names: Optional[Sequence[str]] = None,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> Interpretation:
    """Exact value of every node.  Raises InconsistentCircuit or BudgetExceeded."""
    pn, xn = _names(c, param_names, input_names)
    vals: Dict[int, RatFunc] = {}
    for nd in c.nodes:
        if nd.op == "const":
            v = RatFunc(Poly.const(nd.value), _normalized=True)
        elif nd.op == "param":
            v = RatFunc(Poly.var(pn[nd.value - 1]), _normalized=True)
        elif nd.op == "input":
            v = RatFunc(Poly.var(xn[nd.value - 1]), _normalized=True)
        else:
            a, b = vals[nd.args[0]], vals[nd.args[1]]
            if nd.op == "add":
                v = a + b
            elif nd.op == "sub":
                v = a - b
            elif nd.op == "mul":
                v = a * b
            else:
                if b.is_zero():
                    raise InconsistentCircuit(nd.id)
                v = a / b
            if max_terms is not None and len(v.num) + len(v.den) > max_terms:
                raise BudgetExceeded(len(v.num) + len(v.den), max_terms, f"node {nd.id}")
        vals[nd.id] = v
    return Interpretation(vals, [vals[o] for o in c.outputs], pn, xn)


def final_polys(c: Circuit, **kw) -> List[Poly]:
    """Final results as polynomials (raises ValueError if one is not)."""
    return [f.as_poly() for f in interpret(c, **kw).finals]


def restrict(c: Circuit, u: Mapping[int, Rational]) -> Circuit:
    """Replace assigned parameter leaves by scalars; ``r`` and indices are preserved."""
    nodes = []
    for nd in c.nodes:
        if nd.op == "param" and nd.value in u:
            nodes.append(Node(nd.id, "const", (), rat(u[nd.value])))
        else:
            nodes.append(nd)
    return Circuit(c.name, c.r, c.n, tuple(nodes), c.outputs)


def eval_numeric(c: Circuit, u: Sequence[Rational], x: Sequence[Rational]) -> List[Rational]:
    """Exact output values at a point.  Raises DivisionByZero."""
    if len(u) != c.r or len(x) != c.n:
        raise ValueError(f"expected {c.r} parameter and {c.n} input values")
    vals: Dict[int, Rational] = {}
    for nd in c.nodes:
        if nd.op == "const":
            v = nd.value
        elif nd.op == "param":
            v = rat(u[nd.value - 1])
        elif nd.op == "input":
            v = rat(x[nd.value - 1])
        else:
            a, b = vals[nd.args[0]], vals[nd.args[1]]
            if nd.op == "add":
                v = a + b
            elif nd.op == "sub":
                v = a - b
            elif nd.op == "mul":
                v = a * b
            else:
                if b == 0:
                    raise DivisionByZero(nd.id)
                v = rat(Fraction(a) / b)
        vals[nd.id] = v
    return [vals[o] for o in c.outputs]


def eval_mod(c: Circuit, u: Sequence[int], x: Sequence[int], p: int, nodes: bool = False):
    """Output values modulo ``p``; with ``nodes=True`` the full node table."""
    vals: Dict[int, int] = {}
    for nd in c.nodes:
        op = nd.op
        if op == "const":
            q = Fraction(nd.value)
            if q.denominator % p == 0:
                raise DivisionByZero(nd.id)
            v = q.numerator * pow(q.denominator, -1, p) % p
        elif op == "param":
            v = u[nd.value - 1] % p
        elif op == "input":
            v = x[nd.value - 1] % p
        else:
            a, b = vals[nd.args[0]], vals[nd.args[1]]
            if op == "add":
                v = (a + b) % p
            elif op == "sub":
                v = (a - b) % p
            elif op == "mul":
                v = a * b % p
            else:
                if b == 0:
                    raise DivisionByZero(nd.id)
                v = a * pow(b, -1, p) % p
        vals[nd.id] = v
    if nodes:
        return vals
    return [vals[o] for o in c.outputs]


@dataclass
class CoefficientMap:
    """Per final result: ordered ``(input monomial, coefficient)`` pairs."""

    entries: List[List[Tuple[Monomial, RatFunc]]]
    input_names: List[str]

    def theta(self, k: int = -1) -> List[RatFunc]:
        return [c for _, c in self.entries[k]]

    def recombine(self, k: int) -> RatFunc:
        acc = RatFunc.coerce(0)
        for m, coeff in self.entries[k]:
            acc = acc + coeff * Poly.monomial(m)
        return acc

    def as_dict(self, k: int = -1) -> Dict[Monomial, RatFunc]:
        return dict(self.entries[k])


def coefficient_map(c: Circuit, interp: Optional[Interpretation] = None, **kw) -> CoefficientMap:
    interp = interp or interpret(c, **kw)
    xs = set(interp.input_names[: c.n])
    entries = []
    for out_id, f in zip(c.outputs, interp.finals):
        if f.den.variables() & xs:
            raise NotPolynomialInInputs(out_id)
        split = f.num.coeffs_in(xs)
        row = [(m, RatFunc(split[m], f.den)) for m in sorted(split, key=grlex_key)]
        entries.append(row)
    return CoefficientMap(entries, interp.input_names[: c.n])
