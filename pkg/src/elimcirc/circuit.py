"""Parameterized arithmetic circuits: representation, ``.circ`` I/O, classification, metrics."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import Rational, format_rational, rat
from .errors import InconsistentCircuit, ParseError, ValidationError

LEAF_OPS = ("const", "param", "input")
BINARY_OPS = ("add", "sub", "mul", "div")


@dataclass(frozen=True)
class Node:
    id: int
    op: str
    args: Tuple[int, ...] = ()
    value: object = None  # scalar for const, 1-based index for param/input

    def __post_init__(self):
        if self.op == "const":
            object.__setattr__(self, "value", rat(self.value))

    @property
    def is_leaf(self) -> bool:
        return self.op in LEAF_OPS


@dataclass(frozen=True)
class Circuit:
    """A labelled DAG.  Node ids increase strictly and arguments refer to earlier ids."""

    name: str
    r: int
    n: int
    nodes: Tuple[Node, ...]
    outputs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        validate(self)

    @property
    def index(self) -> Dict[int, Node]:
        return {nd.id: nd for nd in self.nodes}

    def node(self, node_id: int) -> Node:
        for nd in self.nodes:
            if nd.id == node_id:
                return nd
        raise KeyError(node_id)

    @property
    def max_id(self) -> int:
        return self.nodes[-1].id if self.nodes else 0


def validate(c: Circuit) -> None:
    if c.r < 0 or c.n < 0:
        raise ValidationError("negative parameter or input count")
    seen = set()
    last = 0
    for nd in c.nodes:
        if nd.id <= 0:
            raise ValidationError(f"node id {nd.id} is not positive")
        if nd.id in seen:
            raise ValidationError(f"duplicate node id {nd.id}")
        if nd.id <= last:
            raise ValidationError(f"node ids not strictly increasing at {nd.id}")
        last = nd.id
        if nd.op == "const":
            if nd.args:
                raise ValidationError(f"const node {nd.id} has arguments")
        elif nd.op in ("param", "input"):
            bound = c.r if nd.op == "param" else c.n
            if nd.args:
                raise ValidationError(f"{nd.op} node {nd.id} has arguments")
            if not isinstance(nd.value, int) or not 1 <= nd.value <= bound:
                raise ValidationError(f"{nd.op} index {nd.value} out of range 1..{bound} at node {nd.id}")
        elif nd.op in BINARY_OPS:
            if len(nd.args) != 2:
                raise ValidationError(f"{nd.op} node {nd.id} needs exactly two arguments")
            for a in nd.args:
                if a not in seen:
                    raise ValidationError(f"node {nd.id} references undefined or later node {a}")
        else:
            raise ValidationError(f"unknown label {nd.op!r} at node {nd.id}")
        seen.add(nd.id)
    if not c.outputs:
        raise ValidationError("circuit has no outputs")
    for o in c.outputs:
        if o not in seen:
            raise ValidationError(f"output references undefined node {o}")


class CircuitBuilder:
    """Incremental construction with shared leaves."""

    def __init__(self, name: str, r: int, n: int, start_id: int = 1):
        self.name = name
        self.r = r
        self.n = n
        self.nodes: List[Node] = []
        self.outputs: List[int] = []
        self._next = start_id
        self._leaves: Dict[tuple, int] = {}

    def _emit(self, op, args=(), value=None) -> int:
        nid = self._next
        self._next += 1
        self.nodes.append(Node(nid, op, tuple(args), value))
        return nid

    def _leaf(self, op, value) -> int:
        key = (op, rat(value) if op == "const" else value)
        if key not in self._leaves:
            self._leaves[key] = self._emit(op, (), value)
        return self._leaves[key]

    def const(self, c) -> int:
        return self._leaf("const", c)

    def param(self, k: int) -> int:
        return self._leaf("param", k)

    def input(self, i: int) -> int:
        return self._leaf("input", i)

    def add(self, a: int, b: int) -> int:
        return self._emit("add", (a, b))

    def sub(self, a: int, b: int) -> int:
        return self._emit("sub", (a, b))

    def mul(self, a: int, b: int) -> int:
        return self._emit("mul", (a, b))

    def div(self, a: int, b: int) -> int:
        return self._emit("div", (a, b))

    def op(self, op: str, a: int, b: int) -> int:
        return self._emit(op, (a, b))

    def scale(self, c, a: int) -> int:
        """``c * a`` for a scalar ``c`` (free under the non-scalar measure)."""
        c = rat(c)
        if c == 1:
            return a
        return self.mul(self.const(c), a)

    def sum(self, ids: Sequence[int]) -> int:
        if not ids:
            return self.const(0)
        acc = ids[0]
        for x in ids[1:]:
            acc = self.add(acc, x)
        return acc

    def product(self, ids: Sequence[int]) -> int:
        if not ids:
            return self.const(1)
        acc = ids[0]
        for x in ids[1:]:
            acc = self.mul(acc, x)
        return acc

    def output(self, *ids: int) -> None:
        self.outputs.extend(ids)

    def build(self) -> Circuit:
        return Circuit(self.name, self.r, self.n, tuple(self.nodes), tuple(self.outputs))


# -- .circ text format --------------------------------------------------------

_INT = re.compile(r"^-?\d+$")
_CONST = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_circuit(text: str) -> Circuit:
    lines = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line.split()))
    if len(lines) < 4:
        raise ParseError(lines[-1][0] if lines else 1, "expected header, nodes and an output line")

    def header(pos, key):
        no, toks = lines[pos]
        if toks[0] != key or len(toks) != 2:
            raise ParseError(no, f"expected '{key} <value>'")
        return no, toks[1]

    _, name = header(0, "circuit")
    no, r = header(1, "params")
    if not _INT.match(r) or int(r) < 0:
        raise ParseError(no, "params must be a nonnegative integer")
    no, n = header(2, "inputs")
    if not _INT.match(n) or int(n) < 0:
        raise ParseError(no, "inputs must be a nonnegative integer")

    nodes = []
    for no, toks in lines[3:-1]:
        if toks[0] != "node" or len(toks) < 3:
            raise ParseError(no, "expected 'node <id> <label> ...'")
        if not _INT.match(toks[1]):
            raise ParseError(no, f"bad node id {toks[1]!r}")
        nid, label, rest = int(toks[1]), toks[2], toks[3:]
        if label == "const":
            m = _CONST.match(rest[0]) if len(rest) == 1 else None
            if not m:
                raise ParseError(no, "const needs one rational 'p' or 'p/q'")
            q = int(m.group(2)) if m.group(2) else 1
            if q == 0:
                raise ParseError(no, "zero denominator in const")
            nodes.append(Node(nid, "const", (), Fraction(int(m.group(1)), q)))
        elif label in ("param", "input"):
            if len(rest) != 1 or not _INT.match(rest[0]):
                raise ParseError(no, f"{label} needs one integer index")
            nodes.append(Node(nid, label, (), int(rest[0])))
        elif label in BINARY_OPS:
            if len(rest) != 2 or not all(_INT.match(t) for t in rest):
                raise ParseError(no, f"{label} needs two integer node ids")
            nodes.append(Node(nid, label, (int(rest[0]), int(rest[1]))))
        else:
            raise ParseError(no, f"unknown label {label!r}")

    no, toks = lines[-1]
    if toks[0] != "output":
        raise ParseError(no, "last line must be 'output <id> ...'")
    if len(toks) < 2:
        raise ValidationError("empty output list")
    if not all(_INT.match(t) for t in toks[1:]):
        raise ParseError(no, "output ids must be integers")
    return Circuit(name, int(r), int(n), tuple(nodes), tuple(int(t) for t in toks[1:]))


def render_circuit(c: Circuit, comments: Iterable[str] = ()) -> str:
    out = [f"# {line}" if line else "#" for line in comments]
    out += [f"circuit {c.name}", f"params {c.r}", f"inputs {c.n}"]
    for nd in c.nodes:
        if nd.op == "const":
            out.append(f"node {nd.id} const {format_rational(nd.value)}")
        elif nd.op in ("param", "input"):
            out.append(f"node {nd.id} {nd.op} {nd.value}")
        else:
            out.append(f"node {nd.id} {nd.op} {nd.args[0]} {nd.args[1]}")
    out.append("output " + " ".join(str(o) for o in c.outputs))
    return "\n".join(out) + "\n"


def read_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def write_circuit(c: Circuit, path, comments: Iterable[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_circuit(c, comments))


# -- classification and metrics ----------------------------------------------


@dataclass(frozen=True)
class NodeFlags:
    is_parameter_node: bool
    depends_on_input: bool
    is_essential: bool
    is_scalar_node: bool  # depends on no basic parameter and no input


def classify(c: Circuit) -> Dict[int, NodeFlags]:
    flags: Dict[int, NodeFlags] = {}
    for nd in c.nodes:
        if nd.op == "const":
            flags[nd.id] = NodeFlags(True, False, False, True)
        elif nd.op == "param":
            flags[nd.id] = NodeFlags(True, False, False, False)
        elif nd.op == "input":
            flags[nd.id] = NodeFlags(False, True, False, False)
        else:
            a, b = (flags[x] for x in nd.args)
            dep = a.depends_on_input or b.depends_on_input
            if nd.op == "div":
                essential = b.depends_on_input
            elif nd.op in ("add", "mul"):
                essential = a.depends_on_input and b.depends_on_input
            else:
                essential = False
            flags[nd.id] = NodeFlags(not dep, dep, essential, a.is_scalar_node and b.is_scalar_node)
    return flags


@dataclass(frozen=True)
class Metrics:
    total_nodes: int
    internal_nodes: int
    nonscalar_size: int
    nonscalar_depth: int
    essential_mul_count: int
    param_mul_count: int


def _is_nonscalar(nd: Node, flags: Dict[int, NodeFlags]) -> bool:
    if nd.op == "mul":
        return not flags[nd.args[0]].is_scalar_node and not flags[nd.args[1]].is_scalar_node
    if nd.op == "div":
        return not flags[nd.args[1]].is_scalar_node
    return False


def metrics(c: Circuit) -> Metrics:
    flags = classify(c)
    size = depth_max = ess = pmul = internal = 0
    depth: Dict[int, int] = {}
    for nd in c.nodes:
        if nd.is_leaf:
            depth[nd.id] = 0
            continue
        internal += 1
        ns = _is_nonscalar(nd, flags)
        d = max(depth[a] for a in nd.args) + (1 if ns else 0)
        depth[nd.id] = d
        depth_max = max(depth_max, d)
        if ns:
            size += 1
            if nd.op == "mul":
                if flags[nd.args[0]].depends_on_input and flags[nd.args[1]].depends_on_input:
                    ess += 1
                else:
                    pmul += 1
    return Metrics(len(c.nodes), internal, size, depth_max, ess, pmul)


def lint(c: Circuit) -> List[str]:
    """Warnings that do not make the circuit invalid."""
    used = {a for nd in c.nodes for a in nd.args} | set(c.outputs)
    warnings = [f"node {nd.id} has outdegree zero but is not an output" for nd in c.nodes if nd.id not in used]
    if len(set(c.outputs)) != len(c.outputs):
        warnings.append("output list repeats a node")
    return warnings


class DivisionClass(Enum):
    TOTALLY_DIVISION_FREE = "TotallyDivisionFree"
    ESSENTIALLY_DIVISION_FREE = "EssentiallyDivisionFree"
    GENERAL = "General"


def division_class(c: Circuit) -> DivisionClass:
    divs = [nd for nd in c.nodes if nd.op == "div"]
    if not divs:
        return DivisionClass.TOTALLY_DIVISION_FREE
    from .semantics import interpret

    values = interpret(c).values  # raises InconsistentCircuit on a zero divisor
    if all(values[nd.args[1]].is_poly() and values[nd.args[1]].num.is_const() for nd in divs):
        return DivisionClass.TOTALLY_DIVISION_FREE
    flags = classify(c)
    if all(flags[nd.id].is_parameter_node for nd in divs):
        return DivisionClass.ESSENTIALLY_DIVISION_FREE
    return DivisionClass.GENERAL


def robustness(c: Circuit) -> str:
    """``"Robust"`` when certified by total division-freeness, else ``"Unknown"``."""
    try:
        cls = division_class(c)
    except InconsistentCircuit:
        return "Unknown"
    return "Robust" if cls is DivisionClass.TOTALLY_DIVISION_FREE else "Unknown"


def renumber(c: Circuit, start: int = 1, step: int = 1) -> Circuit:
    """Same DAG with ids ``start, start+step, ...``."""
    mapping = {nd.id: start + i * step for i, nd in enumerate(c.nodes)}
    nodes = tuple(Node(mapping[nd.id], nd.op, tuple(mapping[a] for a in nd.args), nd.value) for nd in c.nodes)
    return Circuit(c.name, c.r, c.n, nodes, tuple(mapping[o] for o in c.outputs))


def reachable(c: Circuit, roots: Optional[Iterable[int]] = None) -> set:
    """Ids of nodes on which ``roots`` (default: the outputs) depend."""
    idx = c.index
    stack = list(c.outputs if roots is None else roots)
    seen = set()
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(idx[x].args)
    return seen
