"""Command-line entry point: ``elimcirc <group> <command> ...``.

Exit codes: 0 success / PASS / Equal / Accept, 1 a negative answer (Distinct,
Reject, witness FAIL), 2 usage or parse errors (and Unknown for ``circ equiv``),
3 term budget exceeded, 4 inconsistent circuit.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import __version__
from .algebra import BudgetExceeded, PolyParseError, format_rational, poly_rank, render_poly
from .arithmetize import count_satisfying, parse_bool, standard_arithmetization
from .circuit import (
    classify,
    division_class,
    lint,
    metrics,
    read_circuit,
    render_circuit,
    robustness,
)
from .elim import (
    FAMILIES,
    eliminate_enum,
    eliminate_multmatrix,
    family,
    l_vector,
    witness_delta_rank,
    witness_L_independence,
)
from .errors import (
    ArityMismatch,
    CircuitError,
    CrossCheckFailed,
    DivisionByZero,
    InconsistentCircuit,
    ParseError,
    UnsupportedFamily,
    ValidationError,
)
from .identity import Verdict, equiv
from .pochhammer import gen_chain, read_chain, verify_chain, write_chain
from .semantics import DEFAULT_MAX_TERMS, eval_numeric, interpret, restrict
from .transforms import join, reduce

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET, EXIT_INCONSISTENT = 0, 1, 2, 3, 4


@dataclass
class Report:
    command: str
    inputs: Dict[str, object]
    verdict: str = "ok"
    metrics: Dict[str, object] = field(default_factory=dict)
    witness: Optional[Dict[str, object]] = None
    lines: List[str] = field(default_factory=list)
    code: int = EXIT_OK

    def as_json(self) -> Dict[str, object]:
        doc = {"command": self.command, "inputs": self.inputs, "verdict": self.verdict, "metrics": self.metrics}
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


def _ratlist(text: Optional[str]) -> List:
    if not text:
        return []
    return [Fraction(t) for t in text.split(",")]


def _show(x) -> str:
    return format_rational(x) if isinstance(x, (int, Fraction)) else str(x)


def _emit_text(path: Optional[str], text: str, rep: Report) -> None:
    if path:
        Path(path).write_text(text)
        rep.lines.append(f"wrote {path}")
    else:
        rep.lines.extend(text.rstrip("\n").splitlines())


# -- circ ---------------------------------------------------------------------


def cmd_circ_stats(a, rep: Report) -> None:
    c = read_circuit(a.file)
    m = metrics(c)
    flags = classify(c)
    dc = division_class(c)
    rep.metrics = dict(vars(m))
    rep.metrics.update(
        parameter_nodes=sum(f.is_parameter_node for f in flags.values()),
        essential_nodes=sum(f.is_essential for f in flags.values()),
        division_class=dc.value,
        robustness=robustness(c),
    )
    rep.lines.append(f"circuit {c.name}: params {c.r}, inputs {c.n}, outputs {len(c.outputs)}")
    for k, v in rep.metrics.items():
        rep.lines.append(f"{k} {v}")
    for w in lint(c):
        rep.lines.append(f"warning: {w}")


def cmd_circ_reduce(a, rep: Report) -> None:
    c = read_circuit(a.file)
    out = reduce(c, max_terms=a.max_terms, rng=a.rng)
    rep.metrics = {"nodes_before": len(c.nodes), "nodes_after": len(out.nodes)}
    _emit_text(a.out, render_circuit(out), rep)


def _parse_lambda(text: Optional[str]) -> Optional[Dict[int, int]]:
    if not text:
        return None
    lam = {}
    for part in text.split(","):
        i, pos = part.split("=")
        lam[int(i)] = int(pos)
    return lam


def cmd_circ_join(a, rep: Report) -> None:
    c1, c2 = read_circuit(a.first), read_circuit(a.second)
    out = join(c1, c2, _parse_lambda(a.lam), max_terms=a.max_terms)
    rep.metrics = {"nodes": len(out.nodes)}
    _emit_text(a.out, render_circuit(out), rep)


def cmd_circ_restrict(a, rep: Report) -> None:
    c = read_circuit(a.file)
    assign = {}
    for part in (a.assign or "").split(","):
        if part:
            k, v = part.split("=")
            assign[int(k)] = Fraction(v)
    out = restrict(c, assign)
    interpret(out, max_terms=a.max_terms)  # surfaces inconsistency
    _emit_text(a.out, render_circuit(out), rep)


def cmd_circ_equiv(a, rep: Report) -> None:
    c1, c2 = read_circuit(a.first), read_circuit(a.second)
    res = equiv(c1, c2, mode=a.mode, trials=a.trials, rng=a.rng, max_terms=a.max_terms)
    rep.verdict = res.verdict.value
    rep.metrics = {"trials_run": res.trials_run, "trials_skipped": res.trials_skipped}
    rep.lines.append(res.verdict.value)
    if res.witness:
        rep.witness = res.witness.as_dict()
        rep.lines.append(f"witness params {list(res.witness.params)} inputs {list(res.witness.inputs)} prime {res.witness.prime}")
    rep.lines.extend(res.notes)
    rep.code = {Verdict.EQUAL: EXIT_OK, Verdict.DISTINCT: EXIT_NEGATIVE, Verdict.UNKNOWN: EXIT_USAGE}[res.verdict]


def cmd_circ_eval(a, rep: Report) -> None:
    c = read_circuit(a.file)
    if a.params is None and a.inputs is None:
        pn = a.param_names.split(",") if a.param_names else None
        xn = a.input_names.split(",") if a.input_names else None
        finals = interpret(c, pn, xn, max_terms=a.max_terms).finals
        rep.lines.extend(f"output {k}: {f}" for k, f in enumerate(finals, 1))
        rep.metrics = {"finals": [str(f) for f in finals]}
        return
    vals = eval_numeric(c, _ratlist(a.params), _ratlist(a.inputs))
    rep.lines.extend(f"output {k}: {_show(v)}" for k, v in enumerate(vals, 1))
    rep.metrics = {"values": [_show(v) for v in vals]}


# -- bool / count -------------------------------------------------------------


def cmd_bool_arith(a, rep: Report) -> None:
    b = parse_bool(Path(a.file).read_text())
    ar = standard_arithmetization(b)
    rep.metrics = {"nodes": len(ar.circuit.nodes), "nonscalar_size": metrics(ar.circuit).nonscalar_size}
    _emit_text(a.out, render_circuit(ar.circuit), rep)


def cmd_count_sat(a, rep: Report) -> None:
    b = parse_bool(Path(a.file).read_text())
    bits = [int(ch) for ch in a.assign] if a.assign else []
    res = count_satisfying(b, bits, q=a.q, max_terms=a.max_terms)
    rep.metrics = {
        "k": res.k,
        "order_at_zero": res.order_at_zero,
        "phi1": render_poly(res.phi1),
        "q": res.q,
        "deg_phi1": res.deg_phi1,
        "deg_H": res.deg_H,
    }
    rep.lines += [
        f"k {res.k}",
        f"order at zero l = {res.order_at_zero}: k = 2^{b.n} - l/q = {res.k_from_order}",
        f"phi_1 = {render_poly(res.phi1)}: k = -phi_1(u)/q = {res.k_from_phi1}",
        f"truth table: k = {res.k_truth_table}",
    ]


# -- elim ---------------------------------------------------------------------


def cmd_elim_family(a, rep: Report) -> None:
    fam = family(a.name, a.n, rng=a.rng)
    m = metrics(fam.circuit)
    rep.metrics = {"nonscalar_size": m.nonscalar_size, "total_nodes": m.total_nodes}
    if a.emit == "circ":
        _emit_text(a.out, render_circuit(fam.circuit, fam.comments()), rep)
    elif a.emit == "problem":
        p = fam.problem
        text = [f"params {' '.join(p.params)}", f"inputs {' '.join(p.inputs)}"]
        text += [f"G{i} = {render_poly(g)}" for i, g in enumerate(p.equations, 1)]
        text.append(f"H = {render_poly(p.H)}")
        _emit_text(a.out, "\n".join(text) + "\n", rep)
    else:
        if a.name != "points":
            raise UnsupportedFamily(f"--emit {a.emit} is only available for the points family")
        ex = fam.extras
        if a.emit == "formula":
            _emit_text(a.out, ex["formula_text"] + "\n", rep)
        elif a.emit == "points":
            _emit_text(a.out, "".join(" ".join(map(str, pt)) + "\n" for pt in ex["points"]), rep)
        else:
            key = {"eval-circ": "evaluation_circuit", "decode-circ": "decoder_circuit", "formula-circ": "formula_circuit"}[a.emit]
            _emit_text(a.out, render_circuit(ex[key]), rep)


def _oracle(a, t_order=None):
    p = family(a.name, a.n, rng=a.rng).problem
    if a.method == "multmatrix":
        return eliminate_multmatrix(p, max_n=3, max_terms=a.max_terms)
    return eliminate_enum(p, max_terms=a.max_terms, t_order=t_order)


def cmd_elim_oracle(a, rep: Report) -> None:
    res = _oracle(a)
    rep.metrics = {"degree": res.degree, "terms": len(res.F), "q": res.q, "method": res.method}
    rep.lines.append(f"F = {render_poly(res.F)}")
    rep.lines.append(f"degree {res.degree} in Y, {len(res.F)} terms")


def cmd_elim_witness(a, rep: Report) -> None:
    res = _oracle(a, t_order=1 if a.method == "enum" else None)
    target = 2**a.n
    if a.which == "delta-rank":
        rank = witness_delta_rank(res, a.n)
        ok = rank == target
        rep.metrics = {"rank": rank, "target": target}
        rep.lines.append(f"rank {rank} {'=' if ok else '!='} 2^{a.n} {'PASS' if ok else 'FAIL'}")
    else:
        ok = witness_L_independence(res, a.n)
        rank = poly_rank(l_vector(res))
        rep.metrics = {"rank": rank, "target": target, "independent": ok}
        rep.lines.append(f"L rank {rank} {'=' if ok else '!='} 2^{a.n} {'PASS' if ok else 'FAIL'}")
    rep.verdict = "PASS" if ok else "FAIL"
    rep.code = EXIT_OK if ok else EXIT_NEGATIVE


# -- poch ---------------------------------------------------------------------


def cmd_poch_gen(a, rep: Report) -> None:
    chain = gen_chain(a.n)
    paths = write_chain(chain, a.out)
    rep.metrics = {"levels": len(paths), "nodes": [len(c.nodes) for c in chain.circuits]}
    rep.lines.extend(f"wrote {p}" for p in paths)


def cmd_poch_verify(a, rep: Report) -> None:
    chain = read_chain(a.dir)
    res = verify_chain(chain, trials=a.trials, rng=a.rng)
    rep.verdict = res.verdict
    rep.metrics = {"levels_checked": res.levels_checked, "transcript": [c.as_dict() for c in res.transcript]}
    if res.witness:
        rep.witness = res.witness.as_dict()
    rep.lines.extend(res.lines())
    rep.code = EXIT_OK if res.accepted else EXIT_NEGATIVE


# -- parser -------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for all randomness")
    p.add_argument("--max-terms", type=int, default=argparse.SUPPRESS, help="term budget for symbolic values")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit one JSON document")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="elimcirc", description="Parameterized arithmetic circuit workbench.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    ap.add_argument("--json", action="store_true", default=False)
    ap.add_argument("-v", "--verbose", action="store_true")
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(sub, name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    circ = groups.add_parser("circ", help="circuit files").add_subparsers(dest="cmd", required=True)
    p = leaf(circ, "stats", cmd_circ_stats, "metrics and classification")
    p.add_argument("file")
    p = leaf(circ, "reduce", cmd_circ_reduce, "merge nodes with equal values")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p = leaf(circ, "join", cmd_circ_join, "feed outputs of the first circuit into the second")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--lambda", dest="lam", help="i=pos,... (input i of SECOND reads output pos of FIRST)")
    p.add_argument("-o", "--out")
    p = leaf(circ, "restrict", cmd_circ_restrict, "fix parameters to rationals")
    p.add_argument("file")
    p.add_argument("--assign", required=True, help="k=value,... (parameter indices)")
    p.add_argument("-o", "--out")
    p = leaf(circ, "equiv", cmd_circ_equiv, "identity test")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--mode", choices=["exact", "modular"], default="exact")
    p.add_argument("--trials", type=int, default=8)
    p = leaf(circ, "eval", cmd_circ_eval, "symbolic finals, or values at a point")
    p.add_argument("file")
    p.add_argument("--params", help="comma-separated rationals")
    p.add_argument("--inputs", help="comma-separated rationals")
    p.add_argument("--param-names", help="names for the parameters in symbolic output, e.g. T,U1")
    p.add_argument("--input-names", help="names for the inputs in symbolic output")

    boolg = groups.add_parser("bool", help="Boolean circuits").add_subparsers(dest="cmd", required=True)
    p = leaf(boolg, "arith", cmd_bool_arith, "standard arithmetization")
    p.add_argument("file")
    p.add_argument("-o", "--out")

    count = groups.add_parser("count", help="satisfiability counting").add_subparsers(dest="cmd", required=True)
    p = leaf(count, "sat", cmd_count_sat, "count satisfying inputs at a parameter instance")
    p.add_argument("file")
    p.add_argument("--assign", default="", help="parameter bits, e.g. 10110")
    p.add_argument("--q", type=int, default=1, help="report through the q-th power of F")

    elim = groups.add_parser("elim", help="elimination families").add_subparsers(dest="cmd", required=True)
    for name, fn, hlp in (
        ("family", cmd_elim_family, "emit a family instance"),
        ("oracle", cmd_elim_oracle, "compute the elimination polynomial"),
        ("witness", cmd_elim_witness, "run a lower-bound witness"),
    ):
        p = leaf(elim, name, fn, hlp)
        p.add_argument("--name", choices=FAMILIES, default="basic")
        p.add_argument("--n", type=int, required=True)
        if name == "family":
            p.add_argument(
                "--emit",
                choices=["circ", "problem", "points", "formula", "eval-circ", "decode-circ", "formula-circ"],
                default="circ",
            )
            p.add_argument("-o", "--out")
        else:
            p.add_argument("--method", choices=["enum", "multmatrix"], default="enum")
        if name == "witness":
            p.add_argument("--which", choices=["delta-rank", "l-indep"], required=True)

    poch = groups.add_parser("poch", help="falling factorial chains").add_subparsers(dest="cmd", required=True)
    p = leaf(poch, "gen", cmd_poch_gen, "write a valid chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p = leaf(poch, "verify", cmd_poch_verify, "verify a chain directory")
    p.add_argument("dir")
    p.add_argument("--trials", type=int, default=8)
    return ap


def _inputs(a) -> Dict[str, object]:
    skip = {"fn", "rng", "json", "verbose", "group", "cmd"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if a.seed is None:
        a.seed = random.SystemRandom().getrandbits(64)
    a.rng = random.Random(a.seed)
    rep = Report(f"{a.group} {a.cmd}", _inputs(a))
    try:
        a.fn(a, rep)
    except (ParseError, ValidationError, PolyParseError, ArityMismatch, UnsupportedFamily, OSError, ValueError) as e:
        rep.verdict, rep.code = "error", EXIT_USAGE
        rep.lines.append(f"error: {e}")
    except BudgetExceeded as e:
        rep.verdict, rep.code = "budget", EXIT_BUDGET
        rep.lines.append(f"error: {e}")
    except InconsistentCircuit as e:
        rep.verdict, rep.code = "inconsistent", EXIT_INCONSISTENT
        rep.lines.append(f"error: {e}")
    except (DivisionByZero, CrossCheckFailed) as e:
        rep.verdict, rep.code = "negative", EXIT_NEGATIVE
        rep.lines.append(f"error: {e}")
    except CircuitError as e:
        rep.verdict, rep.code = "error", EXIT_USAGE
        rep.lines.append(f"error: {e}")
    if a.json:
        print(json.dumps(rep.as_json(), indent=2, sort_keys=True, default=str))
    else:
        print(f"seed {a.seed}")
        stream = sys.stderr if rep.verdict in ("error", "budget", "inconsistent") else sys.stdout
        for line in rep.lines:
            print(line, file=stream)
    return rep.code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
