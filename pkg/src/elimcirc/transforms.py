"""Circuit rewriting: reduction, join and broadcasting."""

from __future__ import annotations

import random
from typing import Dict, List, Mapping, Optional, Sequence

from .algebra import BudgetExceeded
from .circuit import Circuit, DivisionClass, Node, division_class
from .errors import ArityMismatch, DivisionByZero
from .identity import random_prime
from .semantics import DEFAULT_MAX_TERMS, eval_mod, interpret

FINGERPRINT_PRIMES = 3


def _exact_classes(c: Circuit, max_terms) -> Dict[int, int]:
    vals = interpret(c, max_terms=max_terms).values
    rep: Dict[int, int] = {}
    poly_reps: Dict[object, int] = {}
    frac_reps: List[int] = []
    for nd in c.nodes:
        v = vals[nd.id]
        if v.is_poly():
            key = v.num
            if key in poly_reps:
                rep[nd.id] = poly_reps[key]
                continue
            poly_reps[key] = nd.id
        else:
            match = next((r for r in frac_reps if vals[r] == v), None)
            if match is not None:
                rep[nd.id] = match
                continue
            frac_reps.append(nd.id)
        rep[nd.id] = nd.id
    return rep


def _modular_classes(c: Circuit, rng: random.Random) -> Dict[int, int]:
    prints: Dict[int, list] = {nd.id: [] for nd in c.nodes}
    for _ in range(FINGERPRINT_PRIMES):
        p = random_prime(rng)
        u = [rng.randrange(p) for _ in range(c.r)]
        x = [rng.randrange(p) for _ in range(c.n)]
        try:
            table = eval_mod(c, u, x, p, nodes=True)
        except DivisionByZero:
            # no usable fingerprint: keep every node distinct
            return {nd.id: nd.id for nd in c.nodes}
        for nd in c.nodes:
            prints[nd.id].append(table[nd.id])
    rep: Dict[int, int] = {}
    seen: Dict[tuple, int] = {}
    for nd in c.nodes:
        key = tuple(prints[nd.id])
        rep[nd.id] = seen.setdefault(key, nd.id)
    return rep


def reduce(c: Circuit, max_terms: Optional[int] = DEFAULT_MAX_TERMS, rng: Optional[random.Random] = None) -> Circuit:
    """Merge nodes with equal intermediate results; the smallest id survives.

    Equality is exact while values fit in ``max_terms``; above the budget the
    comparison falls back to fingerprints modulo three random 62-bit primes.
    """
    try:
        rep = _exact_classes(c, max_terms)
    except BudgetExceeded:
        rep = _modular_classes(c, rng or random.Random(0))
    nodes = []
    for nd in c.nodes:
        if rep[nd.id] != nd.id:
            continue
        nodes.append(Node(nd.id, nd.op, tuple(rep[a] for a in nd.args), nd.value))
    return Circuit(c.name, c.r, c.n, tuple(nodes), tuple(rep[o] for o in c.outputs))


def _splice(
    base: List[Node],
    start: int,
    c2: Circuit,
    param_ids: Dict[int, int],
    input_ids: Mapping[int, int],
):
    """Append ``c2``'s nodes, aliasing its inputs to ``input_ids`` and params to ``param_ids``."""
    mapping: Dict[int, int] = {}
    nxt = start
    for nd in c2.nodes:
        if nd.op == "input":
            mapping[nd.id] = input_ids[nd.value]
            continue
        if nd.op == "param" and nd.value in param_ids:
            mapping[nd.id] = param_ids[nd.value]
            continue
        mapping[nd.id] = nxt
        base.append(Node(nxt, nd.op, tuple(mapping[a] for a in nd.args), nd.value))
        if nd.op == "param":
            param_ids[nd.value] = nxt
        nxt += 1
    return mapping, nxt


def _check_consistent(c: Circuit, max_terms) -> None:
    try:
        interpret(c, max_terms=max_terms)
    except BudgetExceeded:
        pass


def join(
    c1: Circuit,
    c2: Circuit,
    lam: Optional[Mapping[int, int]] = None,
    name: Optional[str] = None,
    check: bool = True,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> Circuit:
    """Compose: input ``i`` of ``c2`` reads output position ``lam[i]`` (1-based) of ``c1``.

    The result has ``c1``'s inputs and ``c2``'s outputs.  ``lam`` defaults to the identity.
    """
    if c1.r != c2.r:
        raise ArityMismatch(f"parameter counts differ: {c1.r} vs {c2.r}")
    if lam is None:
        lam = {i: i for i in range(1, c2.n + 1)}
    missing = [i for i in range(1, c2.n + 1) if i not in lam]
    if missing:
        raise ArityMismatch(f"lambda is not total on c2's inputs; missing {missing}")
    bad = [pos for pos in lam.values() if not 1 <= pos <= len(c1.outputs)]
    if bad:
        raise ArityMismatch(f"lambda refers to output positions {bad} but c1 has {len(c1.outputs)} outputs")
    nodes = list(c1.nodes)
    params = {nd.value: nd.id for nd in c1.nodes if nd.op == "param"}
    inputs = {i: c1.outputs[pos - 1] for i, pos in lam.items()}
    mapping, _ = _splice(nodes, c1.max_id + 1, c2, params, inputs)
    out = Circuit(name or f"{c2.name}_join_{c1.name}", c1.r, c1.n, tuple(nodes), tuple(mapping[o] for o in c2.outputs))
    if check:
        _check_consistent(out, max_terms)
    return out


def broadcast(
    c: Circuit,
    P: Sequence[int],
    gamma: Circuit,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> Circuit:
    """Join ``gamma`` into ``c`` at the nodes ``P`` (input ``k`` of gamma reads ``P[k-1]``), keep
    ``c``'s outputs, then reduce."""
    if gamma.r != c.r:
        raise ArityMismatch(f"parameter counts differ: {c.r} vs {gamma.r}")
    if gamma.n != len(P):
        raise ArityMismatch(f"gamma has {gamma.n} inputs but {len(P)} nodes were given")
    known = {nd.id for nd in c.nodes}
    if any(p not in known for p in P):
        raise ArityMismatch("broadcast node set refers to unknown nodes")
    if division_class(gamma) is not DivisionClass.TOTALLY_DIVISION_FREE:
        raise ValueError("broadcasting requires a totally division-free gamma")
    nodes = list(c.nodes)
    params = {nd.value: nd.id for nd in c.nodes if nd.op == "param"}
    inputs = {k + 1: pid for k, pid in enumerate(P)}
    _splice(nodes, c.max_id + 1, gamma, params, inputs)
    joined = Circuit(c.name, c.r, c.n, tuple(nodes), c.outputs)
    _check_consistent(joined, max_terms)
    return reduce(joined, max_terms=max_terms)

