"""Boolean circuits, their standard arithmetization, and counting satisfying inputs
from the coefficients of an elimination polynomial."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import BudgetExceeded, Poly
from .circuit import Circuit, CircuitBuilder
from .elim import ElimProblem, eliminate_enum, raise_power
from .errors import CrossCheckFailed, ParseError, ValidationError
from .semantics import DEFAULT_MAX_TERMS, interpret

BOOL_OPS = {"and": 2, "or": 2, "not": 1, "const0": 0, "const1": 0, "var": 0}
MAX_COUNT_INPUTS = 12


@dataclass(frozen=True)
class BoolNode:
    id: int
    op: str
    args: Tuple[int, ...] = ()
    value: Optional[int] = None  # variable index for ``var``


@dataclass(frozen=True)
class BoolCircuit:
    """Boolean DAG over ``Z1..Zm``; the first ``r`` variables act as parameters."""

    name: str
    m: int
    r: int
    n: int
    nodes: Tuple[BoolNode, ...]
    outputs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        validate_bool(self)


def validate_bool(b: BoolCircuit) -> None:
    if b.r < 0 or b.n < 0 or b.r + b.n != b.m:
        raise ValidationError(f"split {b.r} {b.n} does not add up to vars {b.m}")
    seen = set()
    last = 0
    for nd in b.nodes:
        if nd.id <= last:
            raise ValidationError(f"node ids must increase strictly (node {nd.id} after {last})")
        last = nd.id
        if nd.op not in BOOL_OPS:
            raise ValidationError(f"node {nd.id}: unknown label {nd.op!r}")
        if len(nd.args) != BOOL_OPS[nd.op]:
            raise ValidationError(f"node {nd.id}: {nd.op} takes {BOOL_OPS[nd.op]} argument(s), got {len(nd.args)}")
        for a in nd.args:
            if a not in seen:
                raise ValidationError(f"node {nd.id}: argument {a} is not an earlier node")
        if nd.op == "var" and not (isinstance(nd.value, int) and 1 <= nd.value <= b.m):
            raise ValidationError(f"node {nd.id}: variable index {nd.value} outside 1..{b.m}")
        seen.add(nd.id)
    if not b.outputs:
        raise ValidationError("empty output list")
    for o in b.outputs:
        if o not in seen:
            raise ValidationError(f"output {o} is not a node")


def parse_bool(text: str) -> BoolCircuit:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line.split()))
    if len(lines) < 5:
        raise ParseError(lines[-1][0] if lines else 1, "expected header, nodes and an output line")
    heads = [("boolcircuit", 2), ("vars", 2), ("split", 3)]
    vals = []
    for (no, toks), (key, width) in zip(lines[:3], heads):
        if toks[0] != key or len(toks) != width:
            raise ParseError(no, f"expected '{key}' header line")
        vals.append(toks[1:])
    name = vals[0][0]
    try:
        m = int(vals[1][0])
        r, n = int(vals[2][0]), int(vals[2][1])
    except ValueError:
        raise ParseError(lines[1][0], "vars and split need integers") from None
    nodes = []
    for no, toks in lines[3:-1]:
        if toks[0] != "node" or len(toks) < 3:
            raise ParseError(no, "expected 'node <id> <label> ...'")
        try:
            nums = [int(t) for t in [toks[1]] + toks[3:]]
        except ValueError:
            raise ParseError(no, "node ids and indices must be integers") from None
        nid, label, rest = nums[0], toks[2], nums[1:]
        if label not in BOOL_OPS:
            raise ParseError(no, f"unknown label {label!r}")
        if label == "var":
            if len(rest) != 1:
                raise ValidationError(f"node {nid}: var takes one index")
            nodes.append(BoolNode(nid, "var", (), rest[0]))
        else:
            nodes.append(BoolNode(nid, label, tuple(rest)))
    no, toks = lines[-1]
    if toks[0] != "output":
        raise ParseError(no, "last line must be 'output <id> ...'")
    try:
        outs = tuple(int(t) for t in toks[1:])
    except ValueError:
        raise ParseError(no, "output ids must be integers") from None
    return BoolCircuit(name, m, r, n, tuple(nodes), outs)


def render_bool(b: BoolCircuit, comments: Sequence[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    out += [f"boolcircuit {b.name}", f"vars {b.m}", f"split {b.r} {b.n}"]
    for nd in b.nodes:
        if nd.op == "var":
            out.append(f"node {nd.id} var {nd.value}")
        else:
            out.append(" ".join([f"node {nd.id} {nd.op}"] + [str(a) for a in nd.args]))
    out.append("output " + " ".join(map(str, b.outputs)))
    return "\n".join(out) + "\n"


def eval_bool(b: BoolCircuit, z: Sequence[int]) -> Dict[int, int]:
    """Value of every node at ``z in {0,1}^m``."""
    vals: Dict[int, int] = {}
    for nd in b.nodes:
        if nd.op == "var":
            v = z[nd.value - 1]
        elif nd.op == "const0":
            v = 0
        elif nd.op == "const1":
            v = 1
        elif nd.op == "not":
            v = 1 - vals[nd.args[0]]
        elif nd.op == "and":
            v = vals[nd.args[0]] & vals[nd.args[1]]
        else:
            v = vals[nd.args[0]] | vals[nd.args[1]]
        vals[nd.id] = v
    return vals


@dataclass
class Arithmetization:
    circuit: Circuit
    node_map: Dict[int, int]  # Boolean node id -> arithmetic node id


def standard_arithmetization(b: BoolCircuit) -> Arithmetization:
    """and -> a*b, or -> a + b - a*b, not -> 1 - a; variables ``<= r`` become parameters."""
    cb = CircuitBuilder(f"{b.name}_arith", b.r, b.n)
    nm: Dict[int, int] = {}
    for nd in b.nodes:
        if nd.op == "var":
            nm[nd.id] = cb.param(nd.value) if nd.value <= b.r else cb.input(nd.value - b.r)
        elif nd.op == "const0":
            nm[nd.id] = cb.const(0)
        elif nd.op == "const1":
            nm[nd.id] = cb.const(1)
        elif nd.op == "not":
            nm[nd.id] = cb.sub(cb.const(1), nm[nd.args[0]])
        elif nd.op == "and":
            nm[nd.id] = cb.mul(nm[nd.args[0]], nm[nd.args[1]])
        else:
            x, y = nm[nd.args[0]], nm[nd.args[1]]
            nm[nd.id] = cb.sub(cb.add(x, y), cb.mul(x, y))
    cb.output(*(nm[o] for o in b.outputs))
    return Arithmetization(cb.build(), nm)


def param_names(r: int) -> List[str]:
    return [f"U{k}" for k in range(1, r + 1)]


def input_names(n: int) -> List[str]:
    return [f"X{i}" for i in range(1, n + 1)]


@dataclass
class CountResult:
    k: int
    k_from_order: int
    k_from_phi1: int
    k_truth_table: int
    order_at_zero: int
    phi1: Poly
    q: int
    deg_phi1: int
    deg_H: int


def _u_degree(p: Poly, names: Sequence[str]) -> int:
    return p.degree_in(names) if p.terms else -1


def count_satisfying(
    b: BoolCircuit,
    u: Sequence[int],
    q: int = 1,
    max_inputs: int = MAX_COUNT_INPUTS,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> CountResult:
    """Number of ``x in {0,1}^n`` with ``h(u, x) = 1``, computed three independent ways.

    ``k = 2^n - l/q`` from the order ``l`` at zero of ``F^q(u, Y)``, ``k = -phi_1(u)/q``
    from the first coefficient of ``F^q``, and by sweeping the truth table.
    """
    if len(b.outputs) != 1:
        raise ValueError("counting needs a circuit with a single output")
    if len(u) != b.r or any(v not in (0, 1) for v in u):
        raise ValueError(f"assignment must be {b.r} bits")
    if b.n > max_inputs:
        raise BudgetExceeded(2**b.n, 2**max_inputs, "truth table")
    if q < 1:
        raise ValueError("q must be positive")
    pn, xn = param_names(b.r), input_names(b.n)
    G = standard_arithmetization(b).circuit
    H = interpret(G, pn, xn, max_terms=max_terms).finals[0].as_poly()
    eqs = [Poly.var(x) ** 2 - Poly.var(x) for x in xn]
    at_u = dict(zip(pn, u))

    # phi_1 as a polynomial in the parameters: only the top coefficient is needed
    top = eliminate_enum(ElimProblem("count", eqs, H, pn, xn), keep=1, max_terms=max_terms)
    phi1 = top.phi[0] * q

    # full F at the instance u, then its q-th power
    full = eliminate_enum(ElimProblem("count", eqs, H.subs(at_u), [], xn), max_terms=max_terms)
    if q > 1:
        full = raise_power(full, q)
    coeffs = [Poly.const(1)] + full.phi
    l = next(i for i, c in enumerate(reversed(coeffs)) if c.terms)
    if l % q:
        raise CrossCheckFailed(f"order at zero {l} is not divisible by q={q}")
    phi1_u = phi1.evaluate(at_u)
    if phi1_u % q:
        raise CrossCheckFailed(f"phi_1(u) = {phi1_u} is not divisible by q={q}")
    k_order = 2**b.n - l // q
    k_phi = int(-phi1_u / q)
    out = b.outputs[0]
    k_truth = sum(eval_bool(b, list(u) + list(x))[out] for x in itertools.product((0, 1), repeat=b.n))
    if not k_order == k_phi == k_truth:
        raise CrossCheckFailed(f"counts disagree: order {k_order}, phi_1 {k_phi}, truth table {k_truth}")
    return CountResult(k_truth, k_order, k_phi, k_truth, l, phi1, q, _u_degree(phi1, pn), _u_degree(H, pn))


def phi_family(n: int) -> BoolCircuit:
    """Size-O(n) circuit for ``AND_i (~X_i | (S_i & X_i))  |  (T & AND_i (~X_i | (U_i & X_i)))``.

    Variables are ``S1..Sn, T, U1..Un`` (parameters) followed by ``X1..Xn``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    nodes: List[BoolNode] = []

    def emit(op, args=(), value=None) -> int:
        nid = len(nodes) + 1
        nodes.append(BoolNode(nid, op, tuple(args), value))
        return nid

    s = [emit("var", value=i) for i in range(1, n + 1)]
    t = emit("var", value=n + 1)
    us = [emit("var", value=n + 1 + i) for i in range(1, n + 1)]
    xs = [emit("var", value=2 * n + 1 + i) for i in range(1, n + 1)]
    nots = [emit("not", (x,)) for x in xs]

    def conj(sel):
        acc = None
        for v, x, nx in zip(sel, xs, nots):
            clause = emit("or", (nx, emit("and", (v, x))))
            acc = clause if acc is None else emit("and", (acc, clause))
        return acc

    a = conj(s)
    bpart = emit("and", (t, conj(us)))
    out = emit("or", (a, bpart))
    return BoolCircuit(f"phi_{n}", 3 * n + 1, 2 * n + 1, n, tuple(nodes), (out,))


def random_bool_circuit(rng: random.Random, m: int, size: int, r: int = 0) -> BoolCircuit:
    """Random Boolean DAG on ``m`` variables with ``size`` inner nodes."""
    nodes: List[BoolNode] = []
    for i in range(1, m + 1):
        nodes.append(BoolNode(i, "var", (), i))
    if rng.random() < 0.3:
        nodes.append(BoolNode(len(nodes) + 1, rng.choice(["const0", "const1"])))
    for _ in range(size):
        nid = len(nodes) + 1
        op = rng.choice(["and", "or", "not"])
        if op == "not":
            nodes.append(BoolNode(nid, op, (rng.randrange(1, nid),)))
        else:
            nodes.append(BoolNode(nid, op, (rng.randrange(1, nid), rng.randrange(1, nid))))
    return BoolCircuit(f"rand_{m}_{size}", m, r, m - r, tuple(nodes), (len(nodes),))
