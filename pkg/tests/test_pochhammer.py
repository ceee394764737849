import random

import pytest

from elimcirc.algebra import Poly
from elimcirc.circuit import Circuit, CircuitBuilder, Node
from elimcirc.elim import falling_factorial
from elimcirc.pochhammer import (
    PochChain,
    build_doubling,
    confirm_reject,
    corrupt,
    doubling_identity_exact,
    falling_factorial_value,
    gen_chain,
    read_chain,
    verify_chain,
    write_chain,
)
from elimcirc.semantics import eval_numeric, interpret
from oracles import falling


def test_chain_values():
    chain = gen_chain(2)
    assert eval_numeric(chain.circuits[0], [], [7]) == [7]
    assert eval_numeric(chain.circuits[1], [], [5]) == [20]
    assert eval_numeric(chain.circuits[2], [], [5]) == [120]


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_chain_matches_falling_factorials(n):
    chain = gen_chain(n)
    for j, c in enumerate(chain.circuits):
        for t in (-3, 0, 9, 40):
            assert eval_numeric(c, [], [t]) == [falling(t, 2**j)]
            assert falling_factorial_value(t, 2**j) == falling(t, 2**j)


def test_doubling_identity_symbolic():
    assert doubling_identity_exact(gen_chain(4))


def test_gen_chain_depth_bound():
    with pytest.raises(ValueError):
        gen_chain(17)


def _doubling_with_shift(prev: Circuit, shift: int) -> Poly:
    b = CircuitBuilder("d", 0, 1)
    t = b.input(1)
    from elimcirc.pochhammer import _copy_into

    left = _copy_into(b, prev, t)
    right = _copy_into(b, prev, b.sub(t, b.const(shift)))
    b.output(b.mul(left, right))
    return interpret(b.build(), input_names=["T"]).finals[0]


def test_shift_is_half_the_length():
    chain = gen_chain(4)
    for j in range(1, 5):
        target = falling_factorial("T", 2**j)
        assert _doubling_with_shift(chain.circuits[j - 1], 2 ** (j - 1)) == target
        # the doubly exponential shift 2^(2^(j-1)) does not factor the falling factorial
        assert _doubling_with_shift(chain.circuits[j - 1], 2 ** (2 ** (j - 1))) != target


def test_verify_accepts_valid_chain():
    report = verify_chain(gen_chain(4), trials=8, rng=random.Random(1))
    assert report.accepted and report.levels_checked == 5
    assert len(report.transcript) == 4 * 8


def _replace(chain: PochChain, j: int, c: Circuit) -> PochChain:
    circuits = list(chain.circuits)
    circuits[j] = c
    return PochChain(circuits)


def test_offset_final_constant_rejected_at_level_2():
    chain = gen_chain(3)
    g = chain.circuits[2]
    one, out = g.max_id + 1, g.max_id + 2
    nodes = g.nodes + (Node(one, "const", (), 1), Node(out, "add", (g.outputs[0], one)))
    bad = _replace(chain, 2, Circuit(g.name, 0, 1, nodes, (out,)))
    report = verify_chain(bad, rng=random.Random(2))
    assert not report.accepted and report.level == 2
    assert confirm_reject(bad, report)


def test_square_instead_of_gamma_1_rejected_at_level_1():
    b = CircuitBuilder("sq", 0, 1)
    t = b.input(1)
    b.output(b.mul(t, t))
    bad = _replace(gen_chain(2), 1, b.build())
    report = verify_chain(bad, rng=random.Random(3))
    assert not report.accepted and report.level == 1
    assert confirm_reject(bad, report)


def test_wrong_gamma_zero_rejected():
    b = CircuitBuilder("g0", 0, 1)
    b.output(b.add(b.input(1), b.const(1)))
    bad = _replace(gen_chain(1), 0, b.build())
    report = verify_chain(bad, rng=random.Random(4))
    assert report.level == 0 and confirm_reject(bad, report)


def test_malformed_chain_rejected():
    b = CircuitBuilder("p", 1, 1)
    b.output(b.param(1))
    report = verify_chain(_replace(gen_chain(1), 1, b.build()))
    assert not report.accepted and report.level == 1


def test_confirm_reject_refuses_accept():
    chain = gen_chain(1)
    assert not confirm_reject(chain, verify_chain(chain, rng=random.Random(0)))


def test_manifest_roundtrip(tmp_path):
    chain = gen_chain(3)
    paths = write_chain(chain, tmp_path)
    assert (tmp_path / "chain.manifest").read_text().split() == [p.name for p in paths]
    again = read_chain(tmp_path)
    assert [c.nodes for c in again.circuits] == [c.nodes for c in chain.circuits]


def test_rebuilt_doubling_equals_generated_level():
    chain = gen_chain(3)
    for j in range(1, 4):
        assert build_doubling(chain.circuits[j - 1], j).nodes == chain.circuits[j].nodes


def test_corruptions_rejected():
    rng = random.Random(7)
    chain = gen_chain(4)
    for _ in range(20):
        bad, level, _ = corrupt(chain, rng)
        report = verify_chain(bad, trials=8, rng=rng)
        assert not report.accepted
        assert report.level in (level, level + 1)
        assert confirm_reject(bad, report)
