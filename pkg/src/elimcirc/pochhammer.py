"""Certified circuit chains for the falling factorials ``T(T-1)...(T-2^j+1)`` and their
randomized verification through the doubling identity.

``Gamma_j`` computes ``prod_{0 <= i < 2^j} (T - i)``.  A chain is checked level by
level: ``Gamma_0`` must be exactly ``T``, and each ``Gamma_j`` must agree with the
circuit obtained by multiplying a copy of ``Gamma_{j-1}`` at ``T`` with a copy at
``T - 2^(j-1)``.  The second check runs modulo a random 62-bit prime at random
points of the bit length prescribed for the combined non-scalar size.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .algebra import Poly
from .circuit import Circuit, CircuitBuilder, Node, metrics, read_circuit, write_circuit
from .errors import BudgetExceeded, DivisionByZero, InconsistentCircuit
from .identity import det_point_count, random_prime
from .semantics import eval_mod, eval_numeric, interpret

log = logging.getLogger(__name__)

MAX_DEPTH = 16
MANIFEST = "chain.manifest"


@dataclass
class PochChain:
    circuits: List[Circuit]

    @property
    def n(self) -> int:
        return len(self.circuits) - 1


def _copy_into(b: CircuitBuilder, c: Circuit, input_id: int) -> int:
    """Replay ``c`` inside ``b`` with its input bound to ``input_id``; returns the output node."""
    m: Dict[int, int] = {}
    for nd in c.nodes:
        if nd.op == "input":
            m[nd.id] = input_id
        elif nd.op == "const":
            m[nd.id] = b.const(nd.value)
        elif nd.op == "param":
            m[nd.id] = b.param(nd.value)
        else:
            m[nd.id] = b.op(nd.op, m[nd.args[0]], m[nd.args[1]])
    return m[c.outputs[0]]


def shift_constant(b: CircuitBuilder, j: int) -> int:
    """The constant ``2^(j-1)`` built from 1 by ``j-1`` doublings."""
    c = b.const(1)
    for _ in range(j - 1):
        c = b.add(c, c)
    return c


def build_doubling(prev: Circuit, j: int, name: Optional[str] = None) -> Circuit:
    """``prev(T) * prev(T - 2^(j-1))`` as a single circuit in ``T``."""
    if j < 1:
        raise ValueError("doubling levels start at 1")
    b = CircuitBuilder(name or f"gamma_{j}", 0, 1)
    t = b.input(1)
    left = _copy_into(b, prev, t)
    shifted = b.sub(t, shift_constant(b, j))
    right = _copy_into(b, prev, shifted)
    b.output(b.mul(left, right))
    return b.build()


def gamma_zero() -> Circuit:
    b = CircuitBuilder("gamma_0", 0, 1)
    b.output(b.input(1))
    return b.build()


def gen_chain(n: int) -> PochChain:
    if not 0 <= n <= MAX_DEPTH:
        raise ValueError(f"chain depth must lie in 0..{MAX_DEPTH}")
    chain = [gamma_zero()]
    for j in range(1, n + 1):
        chain.append(build_doubling(chain[-1], j))
    return PochChain(chain)


def falling_factorial_value(t: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= t - i
    return out


@dataclass
class Check:
    level: int
    prime: Optional[int]
    point: int
    left: int
    right: int

    def as_dict(self):
        return {"level": self.level, "prime": self.prime, "point": self.point, "left": self.left, "right": self.right}


@dataclass
class VerifyReport:
    verdict: str  # "Accept" or "Reject"
    levels_checked: int
    level: Optional[int] = None
    reason: str = ""
    witness: Optional[Check] = None
    transcript: List[Check] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == "Accept"

    def lines(self) -> List[str]:
        out = []
        for c in self.transcript:
            out.append(f"level {c.level} prime {c.prime} point {c.point} gamma' {c.left} gamma {c.right}")
        if self.accepted:
            out.append(f"Accept ({self.levels_checked} levels)")
        else:
            out.append(f"Reject at level {self.level}: {self.reason}")
        return out


def _well_formed(c: Circuit) -> bool:
    return c.r == 0 and c.n == 1 and len(c.outputs) == 1


def _reject(report: VerifyReport, level: int, reason: str, witness: Optional[Check] = None) -> VerifyReport:
    report.verdict = "Reject"
    report.level = level
    report.reason = reason
    report.witness = witness
    return report


def _level_zero(c: Circuit, rng: random.Random, report: VerifyReport) -> Optional[VerifyReport]:
    try:
        value = interpret(c, input_names=["T"]).finals[0]
    except (InconsistentCircuit, BudgetExceeded) as e:
        return _reject(report, 0, f"gamma_0 cannot be interpreted: {e}")
    if value == Poly.var("T"):
        return None
    # find a concrete point where it differs, for a reproducible witness
    p = random_prime(rng)
    for _ in range(64):
        x = rng.randrange(p)
        try:
            v = eval_mod(c, [], [x], p)[0]
        except DivisionByZero:
            continue
        if v != x % p:
            w = Check(0, p, x, x % p, v)
            report.transcript.append(w)
            return _reject(report, 0, "gamma_0 does not compute T", w)
    return _reject(report, 0, "gamma_0 does not compute T")


def verify_chain(chain: PochChain, trials: int = 8, rng: Optional[random.Random] = None) -> VerifyReport:
    """Accept iff ``Gamma_0 = T`` and every level passes the doubling test."""
    rng = rng or random.Random()
    report = VerifyReport("Accept", 0)
    for j, c in enumerate(chain.circuits):
        if not _well_formed(c):
            return _reject(report, j, "circuit must have no parameters, one input and one output")
    if not chain.circuits:
        return _reject(report, 0, "empty chain")
    bad = _level_zero(chain.circuits[0], rng, report)
    if bad:
        return bad
    report.levels_checked = 1
    for j in range(1, len(chain.circuits)):
        gamma = chain.circuits[j]
        rebuilt = build_doubling(chain.circuits[j - 1], j, name=f"gamma_{j}_rebuilt")
        L = metrics(rebuilt).nonscalar_size + metrics(gamma).nonscalar_size
        _, bits = det_point_count(L)
        p = random_prime(rng)
        for _ in range(trials):
            x = rng.randrange(1 << bits)
            try:
                left = eval_mod(rebuilt, [], [x], p)[0]
                right = eval_mod(gamma, [], [x], p)[0]
            except DivisionByZero as e:
                return _reject(report, j, f"division by zero at node {e.node_id}", Check(j, p, x, -1, -1))
            check = Check(j, p, x, left, right)
            report.transcript.append(check)
            if left != right:
                return _reject(report, j, "gamma_j differs from the doubling of gamma_(j-1)", check)
        report.levels_checked = j + 1
    return report


def confirm_reject(chain: PochChain, report: VerifyReport) -> bool:
    """Re-check a Reject witness by exact integer evaluation reduced modulo the stored prime."""
    w = report.witness
    if report.accepted or w is None or w.prime is None:
        return False
    j, p, x = w.level, w.prime, w.point
    try:
        right = eval_numeric(chain.circuits[j], [], [x])[0]
        if j == 0:
            left = x
        else:
            left = eval_numeric(build_doubling(chain.circuits[j - 1], j), [], [x])[0]
    except DivisionByZero:
        return False
    return left % p == w.left and right % p == w.right and (left - right) % p != 0


def doubling_identity_exact(chain: PochChain) -> bool:
    """Symbolic check that each level equals its rebuilt doubling and the falling factorial."""
    t = Poly.var("T")
    for j, c in enumerate(chain.circuits):
        target = Poly.const(1)
        for i in range(2**j):
            target = target * (t - i)
        got = interpret(c, input_names=["T"]).finals[0]
        if got != target:
            return False
        if j:
            again = interpret(build_doubling(chain.circuits[j - 1], j), input_names=["T"]).finals[0]
            if again != got:
                return False
    return True


def write_chain(chain: PochChain, out_dir) -> List[Path]:
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for j, c in enumerate(chain.circuits):
        path = d / f"gamma_{j}.circ"
        write_circuit(c, path, comments=[f"falling factorial of length 2^{j}"])
        paths.append(path)
    (d / MANIFEST).write_text("".join(p.name + "\n" for p in paths))
    return paths


def read_chain(in_dir) -> PochChain:
    d = Path(in_dir)
    names = [ln.strip() for ln in (d / MANIFEST).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    return PochChain([read_circuit(d / name) for name in names])


def corrupt(chain: PochChain, rng: random.Random, max_tries: int = 200) -> tuple:
    """Flip one label or argument somewhere in the chain so that the level's polynomial changes.

    Returns ``(corrupted chain, level, node id)``.  Semantic change is confirmed
    exactly on the affected level.
    """
    for _ in range(max_tries):
        j = rng.randrange(len(chain.circuits))
        c = chain.circuits[j]
        internal = [nd for nd in c.nodes if not nd.is_leaf]
        if not internal:
            continue
        target = rng.choice(internal)
        if rng.random() < 0.5:
            op = rng.choice([o for o in ("add", "sub", "mul") if o != target.op])
            new = Node(target.id, op, target.args)
        else:
            earlier = [nd.id for nd in c.nodes if nd.id < target.id]
            k = rng.randrange(2)
            choice = rng.choice(earlier)
            if choice == target.args[k]:
                continue
            args = list(target.args)
            args[k] = choice
            new = Node(target.id, target.op, tuple(args))
        nodes = tuple(new if nd.id == target.id else nd for nd in c.nodes)
        bad = Circuit(c.name, c.r, c.n, nodes, c.outputs)
        if not _changes_semantics(c, bad, rng):
            continue
        circuits = list(chain.circuits)
        circuits[j] = bad
        return PochChain(circuits), j, target.id
    raise RuntimeError("no semantics-changing corruption found")


def _changes_semantics(a: Circuit, b: Circuit, rng: random.Random) -> bool:
    try:
        fa = interpret(a, input_names=["T"], max_terms=10**5).finals[0]
        fb = interpret(b, input_names=["T"], max_terms=10**5).finals[0]
        return fa != fb
    except BudgetExceeded:
        p = random_prime(rng)
        xs = [rng.randrange(p) for _ in range(4)]
        return any(eval_mod(a, [], [x], p) != eval_mod(b, [], [x], p) for x in xs)
