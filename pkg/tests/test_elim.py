import random
from fractions import Fraction

import pytest
import sympy as sp

from elimcirc.algebra import P, Poly, charpoly, poly_rank
from elimcirc.circuit import metrics
from elimcirc.elim import (
    ElimProblem,
    ElimResult,
    UnsupportedFamily,
    basic_closed_form,
    boolhard_closed_form,
    draw_correctness_points,
    eliminate_enum,
    eliminate_multmatrix,
    family,
    multiplication_matrix,
    output_size_rank,
    raise_power,
    verify_xi_injectivity,
    witness_delta_rank,
    witness_L_independence,
)
from elimcirc.errors import BudgetExceeded
from elimcirc.semantics import coefficient_map, interpret
from oracles import CLOSED_FORM_TERMS, basic_closed_form_sympy, poly_as_sympy_poly

F1 = P("Y^2-(1+T+T*U1)*Y+T+T^2*U1")


def test_family_formulas():
    basic = family("basic", 1).problem
    assert basic.equations == [P("X1^2-X1")] and basic.H == P("X1+T*(1+(U1-1)*X1)")
    hat = family("hat", 1).problem
    assert hat.equations == [P("X1^2-X1-S1")] and hat.H == basic.H
    hard = family("boolhard", 1).problem
    a = P("1+(S1-1)*X1")
    assert hard.H == a + (1 - a) * P("T") * P("1+(U1-1)*X1")


def test_family_problem_matches_circuit_finals():
    for name in ("basic", "hat", "boolhard"):
        for n in (1, 2, 3):
            fam = family(name, n)
            finals = interpret(fam.circuit, fam.param_names, fam.input_names).finals
            assert finals[-1] == fam.problem.H
            assert finals[:-1] == fam.problem.equations


def test_family_errors():
    with pytest.raises(UnsupportedFamily):
        family("cubic", 1)
    with pytest.raises(ValueError):
        family("basic", 0)
    with pytest.raises(ValueError):
        family("basic", 7)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_family_sizes_are_linear(n):
    assert metrics(family("basic", n).circuit).nonscalar_size <= 3 * n + 2
    assert metrics(family("hat", n).circuit).nonscalar_size <= 4 * n + 4
    hard = metrics(family("boolhard", n).circuit).nonscalar_size
    assert hard == 5 * n
    if n <= 4:
        assert hard <= 4 * n + 4


def test_enum_basic_n1():
    assert eliminate_enum(family("basic", 1).problem).F == F1


def test_enum_basic_n2_at_t_zero():
    F = eliminate_enum(family("basic", 2).problem).F
    assert F.degree("Y") == 4
    assert F.subs({"T": 0}) == P("Y*(Y-1)*(Y-2)*(Y-3)")


def test_enum_degenerate_h():
    p = family("basic", 3).problem
    zero = ElimProblem("zero", p.equations, Poly(), p.params, p.inputs)
    assert eliminate_enum(zero).F == Poly.var("Y", 8)


def test_enum_rejects_hat_shape():
    with pytest.raises(UnsupportedFamily):
        eliminate_enum(family("hat", 1).problem)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_closed_form_against_sympy(n):
    F = basic_closed_form(n)
    assert len(F.terms) == CLOSED_FORM_TERMS[n - 1]
    want = basic_closed_form_sympy(n)
    assert (poly_as_sympy_poly(F, want.gens) - want.set_domain("QQ")).is_zero


def test_boolhard_closed_form_matches_enum():
    for n in (1, 2):
        assert eliminate_enum(family("boolhard", n).problem).F == boolhard_closed_form(n)


def test_multiplication_matrix_n1():
    M = multiplication_matrix(family("basic", 1).problem)
    assert M == [[P("T"), P("0")], [P("1+T*U1-T"), P("1+T*U1")]]
    assert charpoly(M) == F1


def test_hat_n1_specializes():
    F = eliminate_multmatrix(family("hat", 1).problem).F
    assert F.subs({"S1": 0}) == F1


def test_hat_with_h_equal_x1():
    p = family("hat", 1).problem
    q = ElimProblem("hat", p.equations, P("X1"), p.params, p.inputs)
    assert eliminate_multmatrix(q).F == P("Y^2-Y-S1")


def test_multmatrix_budget():
    with pytest.raises(BudgetExceeded):
        eliminate_multmatrix(family("basic", 4).problem)


@pytest.mark.parametrize("n", [1, 2])
def test_multmatrix_agrees_with_enum_on_boolhard(n):
    p = family("boolhard", n).problem
    assert eliminate_multmatrix(p).F == eliminate_enum(p).F


def test_delta_n1():
    res = eliminate_enum(family("basic", 1).problem)
    assert res.delta == [P("-(1+U1)"), P("1")]
    assert witness_delta_rank(res, 1) == 2
    assert res.lvec == [P("-(1+U1)"), P("1")]
    assert witness_L_independence(res, 1)


def test_delta_n2():
    assert witness_delta_rank(eliminate_enum(family("basic", 2).problem), 2) == 4


def test_delta_rank_from_multmatrix_result():
    res = eliminate_multmatrix(family("basic", 2).problem)
    assert witness_delta_rank(res, 2) == 4
    assert witness_L_independence(res, 2)


def test_witness_fails_without_t_dependence():
    p = family("basic", 2).problem
    flat = ElimProblem("basic", p.equations, p.H.subs({"T": 0}), p.params, p.inputs)
    assert witness_delta_rank(eliminate_enum(flat), 2) == 0
    assert not witness_L_independence(eliminate_enum(flat), 2)


def test_constructed_dependence_fails():
    res = eliminate_enum(family("basic", 1).problem)
    res.lvec = [res.lvec[0], 2 * res.lvec[0]]
    assert not witness_L_independence(res, 1)


def test_l_independence_family_guard():
    res = eliminate_multmatrix(family("hat", 1).problem)
    with pytest.raises(UnsupportedFamily):
        witness_L_independence(res, 1)


def test_boolhard_witness_loses_one_dimension():
    # the root at eps = 0 is the constant 1, so its factor carries no T
    for n in (1, 2, 3):
        res = eliminate_enum(family("boolhard", n).problem, t_order=1)
        assert witness_delta_rank(res, n) == 2**n - 1
        assert not witness_L_independence(res, n)
    F = eliminate_enum(family("boolhard", 1).problem).F
    assert F.subs({"Y": 1}).is_zero()


def test_vandermonde_identity_n2():
    res = eliminate_enum(family("basic", 2).problem)
    d = res.degree
    for eta in (-1, -2, -3, -4):
        via_delta = sum((c * Fraction(eta) ** (d - k) for k, c in enumerate(res.delta, 1)), Poly())
        direct = res.F.diff("T").subs({"T": 0, "Y": eta})
        assert via_delta == direct
    V = sp.Matrix([[eta ** (d - k) for k in range(1, d + 1)] for eta in (-1, -2, -3, -4)])
    assert V.det() != 0


def test_raise_power_squares():
    res = eliminate_enum(family("basic", 1).problem)
    sq = raise_power(res, 2)
    assert sq.q == 2 and sq.F == F1
    square = Poly.var("Y", 4) + sum((c * Poly.var("Y", 4 - k) for k, c in enumerate(sq.phi, 1)), Poly())
    assert square == F1 * F1
    assert poly_rank([c.diff("T").subs({"T": 0}) for c in sq.phi]) == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_output_exceeds_input(n):
    res = eliminate_enum(family("basic", n).problem)
    assert output_size_rank(res) >= 2**n
    assert metrics(family("basic", n).circuit).nonscalar_size <= 3 * n + 2


def test_coefficient_map_of_points_family():
    fam = family("points", 1, random.Random(0))
    cmap = coefficient_map(fam.circuit, param_names=fam.param_names, input_names=fam.input_names)
    assert cmap.recombine(-1) == fam.problem.H


@pytest.mark.parametrize("n", [1, 2, 3])
def test_xi_injectivity(n, caplog):
    pts = draw_correctness_points(n, random.Random(n))
    assert len(pts) == 16 * n * n + 2
    assert all(abs(v).bit_length() <= 4 * n for p in pts for v in p)
    assert verify_xi_injectivity(n, pts)


def test_xi_rejects_degenerate_points():
    assert not verify_xi_injectivity(2, [(0, 0)] * 66)
