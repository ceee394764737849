import json

import pytest

from elimcirc.circuit import metrics, read_circuit, write_circuit
from elimcirc.cli import main
from elimcirc.elim import family
from elimcirc.pochhammer import gen_chain, write_chain


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_stats(capsys, fixtures):
    path = str(fixtures / "h_family_2.circ")
    code, out, _ = run(capsys, "--seed", "1", "circ", "stats", path)
    assert code == 0
    m = metrics(read_circuit(path))
    assert f"nonscalar_size {m.nonscalar_size}" in out
    assert "division_class" in out


def test_stats_json(capsys, fixtures):
    code, out, _ = run(capsys, "circ", "stats", str(fixtures / "h_family_1.circ"), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["command"] == "circ stats"
    assert set(doc) == {"command", "inputs", "verdict", "metrics"}
    assert doc["metrics"]["nonscalar_size"] == 3


def test_witness_delta_rank(capsys):
    code, out, _ = run(capsys, "elim", "witness", "--which", "delta-rank", "--name", "basic", "--n", "2")
    assert code == 0 and "rank 4 = 2^2 PASS" in out


def test_witness_failure_exit_code(capsys):
    code, out, _ = run(capsys, "elim", "witness", "--which", "l-indep", "--name", "boolhard", "--n", "2")
    assert code == 1 and "FAIL" in out


def test_equiv_reflexive(capsys, fixtures):
    path = str(fixtures / "h_family_2.circ")
    code, out, _ = run(capsys, "circ", "equiv", path, path, "--mode", "exact")
    assert code == 0 and "Equal" in out


def test_equiv_distinct_and_shape_mismatch(capsys, fixtures, tmp_path):
    a = str(fixtures / "h_family_1.circ")
    b = tmp_path / "cube.circ"
    b.write_text("circuit c\nparams 2\ninputs 1\nnode 1 input 1\nnode 2 mul 1 1\nnode 3 mul 2 2\noutput 2 3\n")
    code, out, _ = run(capsys, "--seed", "3", "circ", "equiv", a, str(b), "--mode", "modular")
    assert code == 1 and "Distinct" in out
    code, _, _ = run(capsys, "circ", "equiv", a, str(fixtures / "hat_family_1.circ"))
    assert code == 2


def test_eval_numeric_and_symbolic(capsys, fixtures):
    path = str(fixtures / "h_family_2.circ")
    code, out, _ = run(capsys, "circ", "eval", path, "--params", "1,2,3", "--inputs", "1,1")
    assert code == 0 and "9" in out.split()
    code, out, _ = run(capsys, "circ", "eval", str(fixtures / "h_family_1.circ"),
                       "--param-names", "T,U1", "--input-names", "X1")
    assert code == 0 and "T*U1*X1 - T*X1 + T + X1" in out


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.circ"
    bad.write_text("circuit x\nparams 0\ninputs 1\nnode 1 frobnicate\n")
    code, _, err = run(capsys, "circ", "stats", str(bad))
    assert code == 2 and "error" in err


def test_usage_error_exit_code(capsys):
    code, _, _ = run(capsys, "circ", "nonsense")
    assert code == 2


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "--max-terms", "3", "elim", "oracle", "--name", "basic", "--n", "3")
    assert code == 3 and "error" in err


def test_inconsistent_exit_code(capsys, tmp_path):
    path = tmp_path / "zero.circ"
    path.write_text("circuit z\nparams 0\ninputs 1\nnode 1 input 1\nnode 2 sub 1 1\nnode 3 div 1 2\noutput 3\n")
    code, _, _ = run(capsys, "circ", "eval", str(path))
    assert code == 4


def test_family_emit_matches_library(capsys, tmp_path):
    out = tmp_path / "b2.circ"
    code, _, _ = run(capsys, "elim", "family", "--name", "basic", "--n", "2", "--emit", "circ", "-o", str(out))
    assert code == 0
    assert read_circuit(out).nodes == family("basic", 2).circuit.nodes


def test_oracle_methods_agree(capsys):
    _, enum, _ = run(capsys, "--seed", "0", "elim", "oracle", "--name", "basic", "--n", "2", "--method", "enum")
    _, mm, _ = run(capsys, "--seed", "0", "elim", "oracle", "--name", "basic", "--n", "2", "--method", "multmatrix")
    pick = lambda text: [ln for ln in text.splitlines() if ln.startswith("F")]
    assert pick(enum) and pick(enum) == pick(mm)


def test_count_sat(capsys, fixtures):
    code, out, _ = run(capsys, "count", "sat", str(fixtures / "or2.bool"))
    assert code == 0 and "k 3" in out
    code, out, _ = run(capsys, "count", "sat", str(fixtures / "phi_family_2.bool"), "--assign", "11111", "--q", "2")
    assert code == 0 and "k 4" in out


def test_bool_arith(capsys, fixtures, tmp_path):
    out = tmp_path / "or2.circ"
    code, _, _ = run(capsys, "bool", "arith", str(fixtures / "or2.bool"), "-o", str(out))
    assert code == 0 and read_circuit(out).n == 2


def test_reduce_join_restrict(capsys, fixtures, tmp_path):
    red = tmp_path / "r.circ"
    assert run(capsys, "circ", "reduce", str(fixtures / "h_family_2.circ"), "-o", str(red))[0] == 0
    res = tmp_path / "s.circ"
    assert run(capsys, "circ", "restrict", str(red), "--assign", "1=1,2=1", "-o", str(res))[0] == 0
    joined = tmp_path / "j.circ"
    code, _, _ = run(capsys, "circ", "join", str(fixtures / "xi_eval_2.circ"), str(fixtures / "xi_decode_2.circ"),
                     "-o", str(joined))
    assert code == 0
    code, out, _ = run(capsys, "circ", "equiv", str(joined), str(fixtures / "f_2.circ"))
    assert code == 0


def test_poch_gen_and_verify(capsys, tmp_path):
    d = tmp_path / "chain"
    assert run(capsys, "poch", "gen", "--n", "3", "--out", str(d))[0] == 0
    code, out, _ = run(capsys, "--seed", "5", "poch", "verify", str(d), "--trials", "4")
    assert code == 0 and "Accept" in out


def test_poch_verify_reject(capsys, tmp_path):
    chain = gen_chain(2)
    write_chain(chain, tmp_path)
    write_circuit(chain.circuits[1], tmp_path / "gamma_2.circ")
    code, out, _ = run(capsys, "--seed", "5", "poch", "verify", str(tmp_path))
    assert code == 1 and "Reject at level 2" in out


@pytest.mark.parametrize("argv", [
    ["poch", "verify", "{chain}", "--trials", "3"],
    ["circ", "equiv", "{a}", "{a}", "--mode", "modular"],
    ["elim", "family", "--name", "points", "--n", "1", "--emit", "points"],
])
def test_same_seed_same_transcript(capsys, tmp_path, fixtures, argv):
    write_chain(gen_chain(3), tmp_path / "c")
    subst = {"{chain}": str(tmp_path / "c"), "{a}": str(fixtures / "h_family_2.circ")}
    argv = ["--seed", "42"] + [subst.get(x, x) for x in argv]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert first[1].startswith("seed 42")
    other = run(capsys, *(["--seed", "43"] + argv[2:]))
    if argv[2] == "poch":
        assert other[1] != first[1]


def test_seed_flag_after_subcommand(capsys):
    code, out, _ = run(capsys, "elim", "family", "--name", "basic", "--n", "1", "--emit", "problem", "--seed", "9")
    assert code == 0 and out.startswith("seed 9")
