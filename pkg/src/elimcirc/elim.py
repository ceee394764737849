"""Elimination families, two independent elimination oracles, lower-bound witnesses.

The families live in the variables ``S1..Sn`` (hat/boolhard only), ``T``,
``U1..Un`` (parameters), ``X1..Xn`` (inputs) and ``Y`` (the eliminated
value).  ``eliminate_enum`` multiplies out the linear factors ``Y - H(eps)``
over the Boolean roots; ``eliminate_multmatrix`` takes the characteristic
polynomial of multiplication by ``H`` in the quotient algebra.  The two never
share code beyond the polynomial arithmetic.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    Poly,
    charpoly,
    check_budget,
    independent_rows,
    mat_inverse,
    mat_rank,
    mono_from_dict,
    poly_rank,
    product,
    rat,
)
from .circuit import Circuit, CircuitBuilder
from .errors import UnsupportedFamily
from .identity import correctness_set_size, random_points
from .semantics import DEFAULT_MAX_TERMS, interpret

log = logging.getLogger(__name__)

FAMILIES = ("basic", "hat", "boolhard", "points")
MAX_FAMILY_N = 6
Y = "Y"


def bit(j: int, i: int) -> int:
    """``i``-th binary digit of ``j`` (``i = 1`` is the least significant)."""
    return (j >> (i - 1)) & 1


@dataclass
class ElimProblem:
    """Equations ``G1..Gn`` and distinguished polynomial ``H``."""

    name: str
    equations: List[Poly]
    H: Poly
    params: List[str]
    inputs: List[str]

    @property
    def n(self) -> int:
        return len(self.inputs)


@dataclass
class ElimResult:
    problem: ElimProblem
    F: Poly
    q: int
    phi: List[Poly]  # phi_1 .. phi_{deg F^q}: coefficients of F^q below the leading 1
    method: str = ""
    _delta: Optional[List[Poly]] = field(default=None, repr=False)
    _lvec: Optional[List[Poly]] = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.F.degree(Y)

    @property
    def delta(self) -> List[Poly]:
        """``dphi_k/dT`` at ``T = 0``, computed on first use."""
        if self._delta is None:
            self._delta = [_t_derivative_at_zero(c) for c in self.phi]
        return self._delta

    @delta.setter
    def delta(self, value: List[Poly]) -> None:
        self._delta = value

    @property
    def lvec(self) -> List[Poly]:
        """T-linear coefficients ``L_l`` of the coefficients ``B_l`` of F."""
        if self._lvec is None:
            self._lvec = [t_linear_part(c) for c in self.F.coeff_vector(Y)[1:]]
        return self._lvec

    @lvec.setter
    def lvec(self, value: List[Poly]) -> None:
        self._lvec = value


@dataclass
class Family:
    name: str
    n: int
    circuit: Circuit
    problem: ElimProblem
    param_names: List[str]
    input_names: List[str]
    extras: Dict[str, object] = field(default_factory=dict)

    def comments(self) -> List[str]:
        pn = ", ".join(f"param {k}={v}" for k, v in enumerate(self.param_names, 1))
        xn = ", ".join(f"input {k}={v}" for k, v in enumerate(self.input_names, 1))
        outs = [f"G{i}" for i in range(1, self.n + 1)] + ["H"]
        return [f"family {self.name} n={self.n}", pn, xn, "outputs: " + " ".join(outs)]


# -- families -----------------------------------------------------------------


def _names(name: str, n: int) -> List[str]:
    us = [f"U{i}" for i in range(1, n + 1)]
    if name in ("hat", "boolhard"):
        return [f"S{i}" for i in range(1, n + 1)] + ["T"] + us
    return ["T"] + us


def _build_basic_like(name: str, n: int) -> Circuit:
    pn = _names(name, n)
    b = CircuitBuilder(f"{name}_{n}", len(pn), n)
    idx = {v: k for k, v in enumerate(pn, 1)}
    T = b.param(idx["T"])
    xs = [b.input(i) for i in range(1, n + 1)]
    one = b.const(1)
    gs = []
    for i, x in enumerate(xs, 1):
        g = b.sub(b.mul(x, x), x)
        if name == "hat":
            g = b.sub(g, b.param(idx[f"S{i}"]))
        gs.append(g)

    def affine_product(prefix: str) -> int:
        # prod_i (1 + (V_i - 1) X_i)
        factors = []
        for i, x in enumerate(xs, 1):
            v = b.param(idx[f"{prefix}{i}"])
            factors.append(b.add(one, b.mul(b.sub(v, one), x)))
        return b.product(factors)

    if name == "boolhard":
        a = affine_product("S")
        c = b.mul(T, affine_product("U"))
        h = b.add(a, b.mul(b.sub(one, a), c))
    else:
        lin = b.sum([b.scale(2 ** (i - 1), x) for i, x in enumerate(xs, 1)])
        h = b.add(lin, b.mul(T, affine_product("U")))
    b.output(*gs, h)
    return b.build()


def family(name: str, n: int, rng: Optional[random.Random] = None) -> Family:
    """The circuit beta_n and the elimination problem it encodes."""
    if name not in FAMILIES:
        raise UnsupportedFamily(f"unknown family {name!r}; choose from {FAMILIES}")
    if not 1 <= n <= MAX_FAMILY_N:
        raise ValueError(f"family size n must lie in 1..{MAX_FAMILY_N}")
    base = "basic" if name == "points" else name
    c = _build_basic_like(base, n)
    pn = _names(base, n)
    xn = [f"X{i}" for i in range(1, n + 1)]
    finals = [f.as_poly() for f in interpret(c, pn, xn).finals]
    problem = ElimProblem(name, finals[:-1], finals[-1], pn, xn)
    fam = Family(name, n, c, problem, pn, xn)
    if name == "points":
        fam.extras.update(points_family_extras(n, rng or random.Random(0)))
    return fam


def basic_h(n: int) -> Poly:
    """H^(n) written out directly from its formula."""
    lin = sum((Poly.var(f"X{i}") * 2 ** (i - 1) for i in range(1, n + 1)), Poly())
    prod = Poly.const(1)
    for i in range(1, n + 1):
        prod = prod * (1 + (Poly.var(f"U{i}") - 1) * Poly.var(f"X{i}"))
    return lin + Poly.var("T") * prod


# -- enumeration oracle -------------------------------------------------------


def _boolean_roots_shape(p: ElimProblem) -> bool:
    for g, x in zip(p.equations, p.inputs):
        X = Poly.var(x)
        if g != X * X - X:
            return False
    return len(p.equations) == len(p.inputs)


def boolean_points(n: int) -> List[Tuple[int, ...]]:
    """``{0,1}^n`` ordered by ``j = sum eps_i 2^(i-1)``."""
    return [tuple(bit(j, i) for i in range(1, n + 1)) for j in range(2**n)]


def elementary_coeffs(
    values: Sequence[Poly],
    keep: Optional[int] = None,
    max_terms=None,
    t_order: Optional[int] = None,
) -> List[Poly]:
    """Coefficients ``[1, c1, c2, ...]`` of ``prod (Y - v)``, optionally only the first ``keep+1``.

    With ``t_order`` every coefficient is truncated to degree ``<= t_order`` in ``T``.
    """
    coeffs = [Poly.const(1)]
    for v in values:
        if not v.terms:
            # a zero root multiplies by Y
            if keep is None or len(coeffs) <= keep:
                coeffs = coeffs + [Poly()]
            continue
        top = len(coeffs) if keep is None else min(len(coeffs), keep)
        nxt = list(coeffs)
        if keep is None or len(coeffs) <= keep:
            nxt.append(Poly())
        for k in range(top, 0, -1):
            nxt[k] = nxt[k] - v * coeffs[k - 1]
            if t_order is not None:
                nxt[k] = nxt[k].truncate("T", t_order)
            check_budget(nxt[k], max_terms, f"coefficient {k}")
        coeffs = nxt
    return coeffs


def _assemble(coeffs: Sequence[Poly], var: str = Y) -> Poly:
    d = len(coeffs) - 1
    out = Poly()
    for k, c in enumerate(coeffs):
        out = out + c * Poly.var(var, d - k)
    return out


def t_linear_part(p: Poly, t: str = "T") -> Poly:
    return p.coeffs_in([t]).get(((t, 1),), Poly())


def _t_derivative_at_zero(p: Poly, t: str = "T") -> Poly:
    return p.diff(t).subs({t: 0})


def eliminate_enum(
    p: ElimProblem,
    keep: Optional[int] = None,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
    t_order: Optional[int] = None,
) -> ElimResult:
    """``F = prod_{eps in {0,1}^n} (Y - H(eps))``.

    ``keep`` limits the computation to the first ``keep`` coefficients below
    the leading one (the returned ``F`` is then only those top terms).
    ``t_order`` keeps only terms of degree ``<= t_order`` in ``T``; ``t_order=1``
    is all the lower-bound witnesses need and is much cheaper on boolhard.
    """
    if not _boolean_roots_shape(p):
        raise UnsupportedFamily("enumeration oracle needs G_i = X_i^2 - X_i")
    values = [p.H.subs(dict(zip(p.inputs, eps))) for eps in boolean_points(p.n)]
    coeffs = elementary_coeffs(values, keep, max_terms, t_order)
    F = sum((c * Poly.var(Y, len(values) - k) for k, c in enumerate(coeffs)), Poly())
    return ElimResult(p, F, 1, coeffs[1:], method="enum" if t_order is None else f"enum mod T^{t_order + 1}")


def power_coeffs(coeffs: Sequence[Poly], q: int) -> List[Poly]:
    """Coefficient list (leading first) of the ``q``-th power of a polynomial in Y."""
    out = [Poly.const(1)]
    for _ in range(q):
        nxt = [Poly() for _ in range(len(out) + len(coeffs) - 1)]
        for i, a in enumerate(out):
            for j, b in enumerate(coeffs):
                if a.terms and b.terms:
                    nxt[i + j] = nxt[i + j] + a * b
        out = nxt
    return out


def raise_power(res: ElimResult, q: int) -> ElimResult:
    """The same elimination polynomial reported as the power ``F^q``."""
    base = res.F.coeff_vector(Y)
    phi = power_coeffs(base, q)[1:]
    return dataclasses.replace(res, q=q, phi=phi, _delta=None)


# -- multiplication-matrix oracle --------------------------------------------


def _quadratic_shifts(p: ElimProblem) -> List[Poly]:
    """For ``G_i = X_i^2 - X_i - c_i`` with ``c_i`` free of inputs, return the ``c_i``."""
    xs = set(p.inputs)
    shifts = []
    for g, x in zip(p.equations, p.inputs):
        X = Poly.var(x)
        c = X * X - X - g
        if c.variables() & xs:
            raise UnsupportedFamily(f"equation {g} is not of the form {x}^2 - {x} - c with c free of inputs")
        shifts.append(c)
    if len(shifts) != len(p.inputs):
        raise UnsupportedFamily("need one equation per input")
    return shifts


def _power_reduction(c: Poly, e: int) -> Tuple[Poly, Poly]:
    """``X^e = a X + b`` modulo ``X^2 - X - c``."""
    if e == 0:
        return Poly(), Poly.const(1)
    a, b = Poly.const(1), Poly()
    for _ in range(e - 1):
        a, b = a + b, a * c
    return a, b


def normal_form(f: Poly, inputs: Sequence[str], shifts: Sequence[Poly]) -> Dict[Tuple[int, ...], Poly]:
    """Reduce ``f`` to multilinear form; keys are exponent tuples in ``{0,1}^n``."""
    pos = {x: i for i, x in enumerate(inputs)}
    cache: Dict[Tuple[int, int], Tuple[Poly, Poly]] = {}
    out: Dict[Tuple[int, ...], Poly] = {}
    for m, coeff in f.terms.items():
        rest = []
        partial = {(0,) * len(inputs): Poly.const(coeff)}
        for v, e in m:
            if v not in pos:
                rest.append((v, e))
                continue
            i = pos[v]
            if (i, e) not in cache:
                cache[(i, e)] = _power_reduction(shifts[i], e)
            a, b = cache[(i, e)]
            nxt: Dict[Tuple[int, ...], Poly] = {}
            for key, val in partial.items():
                if a.terms:
                    k1 = key[:i] + (1,) + key[i + 1:]
                    nxt[k1] = nxt.get(k1, Poly()) + val * a
                if b.terms:
                    nxt[key] = nxt.get(key, Poly()) + val * b
            partial = nxt
        outer = Poly({tuple(rest): 1})
        for key, val in partial.items():
            out[key] = out.get(key, Poly()) + val * outer
    return {k: v for k, v in out.items() if v.terms}


def multiplication_matrix(p: ElimProblem) -> List[List[Poly]]:
    """Matrix of multiplication by H on the basis ``X^eps`` ordered by ``j = sum eps_i 2^(i-1)``.

    Entry ``[i][j]`` is the coefficient of basis element ``i`` in ``H * basis_j``.
    """
    shifts = _quadratic_shifts(p)
    pts = boolean_points(p.n)
    index = {eps: k for k, eps in enumerate(pts)}
    M = [[Poly() for _ in pts] for _ in pts]
    for j, eps in enumerate(pts):
        mono = Poly.monomial(mono_from_dict(dict(zip(p.inputs, eps))))
        nf = normal_form(p.H * mono, p.inputs, shifts)
        for key, val in nf.items():
            M[index[key]][j] = val
    return M


def eliminate_multmatrix(
    p: ElimProblem,
    max_n: int = 3,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> ElimResult:
    """``F = det(Y I - M_H)`` over the rank-``2^n`` quotient algebra."""
    if p.n > max_n:
        from .algebra import BudgetExceeded

        raise BudgetExceeded(2 ** p.n, 2**max_n, "multiplication matrix dimension")
    M = multiplication_matrix(p)
    F = check_budget(charpoly(M, Y), max_terms, "characteristic polynomial")
    coeffs = F.coeff_vector(Y)
    return ElimResult(p, F, 1, coeffs[1:], method="multmatrix")


# -- closed forms -------------------------------------------------------------


def basic_closed_form(n: int) -> Poly:
    """``prod_{0 <= j < 2^n} (Y - (j + T prod_i U_i^[j]_i))``, multiplied out directly.

    The product runs through python-flint when available, so it shares no
    multiplication code with the enumeration oracle.
    """
    y, t = Poly.var(Y), Poly.var("T")
    factors = []
    for j in range(2**n):
        mono = Poly.monomial(mono_from_dict({f"U{i}": bit(j, i) for i in range(1, n + 1)}))
        factors.append(y - (j + t * mono))
    return product(factors)


def boolhard_closed_form(n: int) -> Poly:
    y, t = Poly.var(Y), Poly.var("T")
    F = Poly.const(1)
    for j in range(2**n):
        s = Poly.monomial(mono_from_dict({f"S{i}": bit(j, i) for i in range(1, n + 1)}))
        u = Poly.monomial(mono_from_dict({f"U{i}": bit(j, i) for i in range(1, n + 1)}))
        F = F * (y - (s + (1 - s) * t * u))
    return F


def closed_form_circuit(n: int) -> Circuit:
    """Circuit with parameters ``T, U1..Un`` and input ``Y`` computing F^(n) as a product."""
    b = CircuitBuilder(f"F_{n}", n + 1, 1)
    T = b.param(1)
    yid = b.input(1)
    factors = []
    for j in range(2**n):
        us = [b.param(i + 1) for i in range(1, n + 1) if bit(j, i)]
        tu = b.product([T] + us)
        factors.append(b.sub(b.sub(yid, b.const(j)), tu))
    b.output(b.product(factors))
    return b.build()


def falling_factorial(var: str, k: int) -> Poly:
    x = Poly.var(var)
    out = Poly.const(1)
    for j in range(k):
        out = out * (x - j)
    return out


# -- witnesses ----------------------------------------------------------------


@dataclass
class WitnessReport:
    which: str
    rank: int
    target: int

    @property
    def passed(self) -> bool:
        return self.rank == self.target


def witness_delta_rank(res: ElimResult, n: int) -> int:
    """Rank over Q of the T-linear parts ``dphi_k/dT (T=0)`` of the coefficients of F^q."""
    if "T" not in res.problem.params:
        raise UnsupportedFamily("the delta-rank witness needs a parameter named T")
    return poly_rank(res.delta)


def l_vector(res: ElimResult) -> List[Poly]:
    return res.lvec


def witness_L_independence(res: ElimResult, n: int) -> bool:
    """Whether the T-linear coefficients ``L_l`` of ``B_l`` span a ``2^n``-dimensional space."""
    if res.problem.name not in ("basic", "boolhard", "points"):
        raise UnsupportedFamily(f"L-independence is defined for basic and boolhard, not {res.problem.name}")
    L = l_vector(res)
    return len(L) == 2**n and poly_rank(L) == 2**n


def output_size_rank(res: ElimResult) -> int:
    """Q-rank of the fully expanded coefficient family of F: all parameter polynomials
    multiplying a monomial ``T^a Y^b``."""
    polys = []
    for k, c in enumerate(res.F.coeff_vector(Y)):
        polys.extend(c.coeffs_in(["T"]).values())
    return poly_rank(polys)


# -- point-evaluation encoding ------------------------------------------------


def multilinear_rows(points: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    """Evaluation matrix of the monomials ``X^eps`` (ordered by j) at integer points."""
    rows = []
    for pt in points:
        row = []
        for eps in boolean_points(n):
            v = 1
            for e, x in zip(eps, pt):
                if e:
                    v *= x
            row.append(v)
        rows.append(row)
    return rows


def draw_correctness_points(n: int, rng: random.Random, max_attempts: int = 50) -> List[Tuple[int, ...]]:
    """``16n^2+2`` random points of bit length ``<= 4n`` whose evaluation map is injective on
    the multilinear span; resamples on failure."""
    K, bits = correctness_set_size(n)
    for attempt in range(max_attempts):
        pts = random_points(K, n, bits, rng)
        if mat_rank(multilinear_rows(pts, n)) == 2**n:
            return pts
        log.warning("correctness point set attempt %d for n=%d is degenerate; resampling", attempt + 1, n)
    raise RuntimeError(f"no injective point set found in {max_attempts} attempts")


def xi_left_inverse(points: Sequence[Sequence[int]], n: int) -> Tuple[List[int], List[List]]:
    """Rows ``R`` and ``A_R^{-1}`` recovering multilinear coefficients from values at ``R``."""
    rows = multilinear_rows(points, n)
    R = independent_rows(rows)
    if len(R) < 2**n:
        raise ValueError("point set does not determine multilinear polynomials")
    R = R[: 2**n]
    return R, mat_inverse([rows[i] for i in R])


def h_at_point(b: CircuitBuilder, n: int, xi: Sequence[int], T: int, us: Sequence[int]) -> int:
    one = b.const(1)
    lin = sum(2 ** (i - 1) * x for i, x in enumerate(xi, 1))
    factors = [b.add(one, b.scale(x, b.sub(u, one))) for x, u in zip(xi, us)]
    return b.add(b.const(lin), b.mul(T, b.product(factors)))


def points_family_extras(n: int, rng: random.Random) -> Dict[str, object]:
    pts = draw_correctness_points(n, rng)
    K = len(pts)
    R, inv = xi_left_inverse(pts, n)

    # evaluation circuit: parameters T, U; input Y; outputs H(T,U,xi_k) and Y
    b = CircuitBuilder(f"xi_eval_{n}", n + 1, 1)
    T = b.param(1)
    us = [b.param(i + 1) for i in range(1, n + 1)]
    outs = [h_at_point(b, n, xi, T, us) for xi in pts]
    b.output(*outs, b.input(1))
    evaluation = b.build()

    # decoder circuit: inputs S_1..S_K, Y; prod_eps (Y - phi_eps(S))
    d = CircuitBuilder(f"xi_decode_{n}", n + 1, K + 1)
    svals = [d.input(k) for k in range(1, K + 1)]
    y = d.input(K + 1)
    factors = []
    for eps in boolean_points(n):
        mono_row = [int(all(e >= a for e, a in zip(eps, alpha))) for alpha in boolean_points(n)]
        weights = [rat(sum(Fraction(mono_row[a]) * inv[a][k] for a in range(2**n))) for k in range(2**n)]
        terms = [d.scale(w, svals[R[k]]) for k, w in enumerate(weights) if w]
        factors.append(d.sub(y, d.sum(terms)))
    d.output(d.product(factors))
    decoder = d.build()

    # formula (11): parameters S_1..S_K, Y; inputs X_1..X_n, T, U_1..U_n
    f = CircuitBuilder(f"exists_{n}", K + 1, 2 * n + 1)
    fx = [f.input(i) for i in range(1, n + 1)]
    fT = f.input(n + 1)
    fu = [f.input(n + 1 + i) for i in range(1, n + 1)]
    eqs = [f.sub(f.mul(x, x), x) for x in fx]
    for k, xi in enumerate(pts, 1):
        eqs.append(f.sub(f.param(k), h_at_point(f, n, xi, fT, fu)))
    one = f.const(1)
    lin = f.sum([f.scale(2 ** (i - 1), x) for i, x in enumerate(fx, 1)])
    prod = f.product([f.add(one, f.mul(f.sub(u, one), x)) for u, x in zip(fu, fx)])
    eqs.append(f.sub(f.param(K + 1), f.add(lin, f.mul(fT, prod))))
    f.output(*eqs)
    formula_circuit = f.build()

    return {
        "points": pts,
        "rows": R,
        "evaluation_circuit": evaluation,
        "decoder_circuit": decoder,
        "formula_circuit": formula_circuit,
        "formula_text": formula_text(n, pts),
    }


def formula_text(n: int, pts: Sequence[Sequence[int]]) -> str:
    xs = " ".join(f"(exists X{i})" for i in range(1, n + 1))
    us = " ".join(f"(exists U{i})" for i in range(1, n + 1))
    h = lambda arg: f"H(T,U,{arg})"  # noqa: E731
    parts = [f"X{i}^2 - X{i} = 0" for i in range(1, n + 1)]
    parts += [f"S{k} = {h(','.join(map(str, p)))}" for k, p in enumerate(pts, 1)]
    parts.append(f"Y = {h('X')}")
    return f"{xs} (exists T) {us} (" + " and ".join(parts) + ")"


def verify_xi_injectivity(n: int, pts: Sequence[Sequence[int]]) -> bool:
    """Symbolic check that the point values determine every member of the family.

    The values ``H(T,U,xi_k)`` are computed as polynomials in ``T, U``; the left
    inverse must recover exactly the coefficients of ``H`` in the inputs and the
    recovered polynomial must reproduce all ``K`` values.
    """
    rows = multilinear_rows(pts, n)
    if mat_rank(rows) != 2**n:
        return False
    H = basic_h(n)
    xs = [f"X{i}" for i in range(1, n + 1)]
    values = [H.subs(dict(zip(xs, pt))) for pt in pts]
    R, inv = xi_left_inverse(pts, n)
    coeffs = [sum((values[R[k]] * inv[a][k] for k in range(2**n)), Poly()) for a in range(2**n)]
    rebuilt = Poly()
    for a, eps in enumerate(boolean_points(n)):
        rebuilt = rebuilt + coeffs[a] * Poly.monomial(mono_from_dict(dict(zip(xs, eps))))
    if rebuilt != H:
        return False
    return all(rebuilt.subs(dict(zip(xs, pt))) == v for pt, v in zip(pts, values))
