"""Exact rational arithmetic, sparse multivariate polynomials and rational functions.

Scalars are Python ``int`` or :class:`fractions.Fraction`; a Fraction whose
denominator is 1 is always stored as a plain ``int``.  Variables are named by
strings such as ``"T"``, ``"U3"`` or ``"X1"`` and are ordered by their
alphabetic prefix and then by their numeric suffix.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Rational = Union[int, Fraction]
Monomial = Tuple[Tuple[str, int], ...]

ONE_MONO: Monomial = ()


def rat(x) -> Rational:
    """Coerce to the canonical scalar type (int when integral)."""
    if type(x) is int:
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rat(Fraction(x))
    if isinstance(x, float):
        raise TypeError("floating point scalars are not supported")
    return rat(Fraction(x))


def format_rational(c: Rational) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# -- variables and monomials -------------------------------------------------

_VAR_RE = re.compile(r"^([A-Za-z_]+)(\d*)$")


@lru_cache(maxsize=None)
def var_key(name: str) -> Tuple[str, int, str]:
    m = _VAR_RE.match(name)
    if not m:
        return (name, -1, name)
    prefix, digits = m.groups()
    return (prefix, int(digits) if digits else -1, name)


def _item_key(item):
    return var_key(item[0])


@lru_cache(maxsize=1 << 20)
def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    # both factors are sorted, so a linear merge suffices
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, vb = a[i][0], b[j][0]
        if va == vb:
            out.append((va, a[i][1] + b[j][1]))
            i += 1
            j += 1
        elif var_key(va) < var_key(vb):
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_from_dict(d: Mapping[str, int]) -> Monomial:
    return tuple(sorted(((v, e) for v, e in d.items() if e), key=_item_key))


def _lex_cmp(a: Monomial, b: Monomial) -> int:
    # dense lexicographic comparison; the earlier variable dominates
    for (va, ea), (vb, eb) in zip(a, b):
        if va != vb:
            return 1 if var_key(va) < var_key(vb) else -1
        if ea != eb:
            return 1 if ea > eb else -1
    if len(a) == len(b):
        return 0
    return 1 if len(a) > len(b) else -1


def grlex_cmp(a: Monomial, b: Monomial) -> int:
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return 1 if da > db else -1
    return _lex_cmp(a, b)


grlex_key = cmp_to_key(grlex_cmp)


def format_monomial(m: Monomial) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


# -- polynomials -------------------------------------------------------------


class BudgetExceeded(Exception):
    """A polynomial grew beyond the configured term budget."""

    def __init__(self, terms: int, budget: int, where: str = ""):
        self.terms = terms
        self.budget = budget
        self.where = where
        msg = f"{terms} terms exceed budget {budget}"
        super().__init__(f"{msg} at {where}" if where else msg)


class Poly:
    """Immutable sparse polynomial with rational coefficients.

    ``terms`` maps monomials (sorted tuples of ``(var, exponent)``) to
    nonzero coefficients.  Two polynomials are equal iff their term maps are.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None, *, _trusted=False):
        if _trusted:
            self.terms = terms
        else:
            clean = {}
            for m, c in (terms or {}).items():
                c = rat(c)
                if c:
                    clean[m] = c
            self.terms = clean
        self._hash = None

    # construction
    @classmethod
    def const(cls, c) -> "Poly":
        c = rat(c)
        return cls({ONE_MONO: c} if c else {}, _trusted=True)

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        if power == 0:
            return cls.const(1)
        return cls({((name, power),): 1}, _trusted=True)

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Poly":
        return cls({m: c})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    # inspection
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def const_value(self) -> Rational:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(ONE_MONO, 0)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def degree(self, var: str | None = None) -> int:
        """Total degree, or the degree in ``var``; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(mono_degree(m) for m in self.terms)
        return max(dict(m).get(var, 0) for m in self.terms)

    def degree_in(self, vars: Iterable[str]) -> int:
        vs = set(vars)
        if not self.terms:
            return -1
        return max(sum(e for v, e in m if v in vs) for m in self.terms)

    def sorted_terms(self) -> List[Tuple[Monomial, Rational]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_term(self) -> Tuple[Monomial, Rational]:
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    # arithmetic
    def __add__(self, other):
        other = Poly.coerce(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for m, c in b.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = rat(s)
            else:
                out.pop(m, None)
        return Poly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = rat(other)
            if not c:
                return Poly()
            return Poly({m: rat(v * c) for m, v in self.terms.items()}, _trusted=True)
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Monomial, Rational] = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly({m: c if type(c) is int else rat(c) for m, c in out.items()}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, c):
        if isinstance(c, Poly):
            raise TypeError("use exact_div or RatFunc for polynomial division")
        return self * (Fraction(1) / rat(c))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE_MONO: rat(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({str(self)!r})"

    def __str__(self):
        return render_poly(self)

    # calculus and substitution
    def diff(self, var: str) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if e:
                d[var] = e - 1
                out[mono_from_dict(d)] = c * e
        return Poly(out)

    def subs(self, assignment: Mapping[str, object]) -> "Poly":
        """Substitute rationals or polynomials for variables; others stay symbolic."""
        if not assignment:
            return self
        values = {v: (x if isinstance(x, Poly) else Poly.const(x)) for v, x in assignment.items()}
        if all(x.is_const() for x in values.values()):
            return self._subs_scalar({v: x.const_value() for v, x in values.items()})
        out = Poly()
        power_cache: Dict[Tuple[str, int], Poly] = {}
        for m, c in self.terms.items():
            keep = []
            term = Poly.const(c)
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in power_cache:
                        power_cache[key] = values[v] ** e
                    term = term * power_cache[key]
                else:
                    keep.append((v, e))
            out = out + term * Poly({tuple(keep): 1}, _trusted=True)
        return out

    def _subs_scalar(self, values: Mapping[str, Rational]) -> "Poly":
        out: Dict[Monomial, Rational] = {}
        for m, c in self.terms.items():
            keep = []
            for v, e in m:
                if v in values:
                    c = c * values[v] ** e
                    if not c:
                        break
                else:
                    keep.append((v, e))
            if not c:
                continue
            k = tuple(keep)
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly({m: rat(c) for m, c in out.items()}, _trusted=True)

    def evaluate(self, assignment: Mapping[str, Rational]) -> Rational:
        """Evaluate at a full assignment; raises KeyError for a missing variable."""
        total = 0
        for m, c in self.terms.items():
            for v, e in m:
                c = c * assignment[v] ** e
            total += c
        return rat(total)

    def eval_mod(self, assignment: Mapping[str, int], p: int) -> int:
        total = 0
        for m, c in self.terms.items():
            c = Fraction(c)
            t = c.numerator * pow(c.denominator, -1, p) % p
            for v, e in m:
                t = t * pow(assignment[v], e, p) % p
            total += t
        return total % p

    # views
    def coeff_vector(self, main: str) -> List["Poly"]:
        """Coefficients ``[c0, ..., cd]`` with ``self = sum c_k * main**(d-k)``."""
        if not self.terms:
            return [Poly()]
        by_deg: Dict[int, Dict[Monomial, Rational]] = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for v, x in m:
                if v == main:
                    e = x
                else:
                    rest.append((v, x))
            by_deg.setdefault(e, {})[tuple(rest)] = c
        d = max(by_deg)
        return [Poly(by_deg.get(d - k, {}), _trusted=True) for k in range(d + 1)]

    def coeffs_in(self, vars: Iterable[str]) -> Dict[Monomial, "Poly"]:
        """Split into ``{monomial in vars: coefficient in the remaining variables}``."""
        vs = set(vars)
        out: Dict[Monomial, Dict[Monomial, Rational]] = {}
        for m, c in self.terms.items():
            inner = tuple((v, e) for v, e in m if v in vs)
            outer = tuple((v, e) for v, e in m if v not in vs)
            out.setdefault(inner, {})[outer] = c
        return {k: Poly(v, _trusted=True) for k, v in out.items()}

    def truncate(self, var: str, max_degree: int) -> "Poly":
        """Drop all terms whose degree in ``var`` exceeds ``max_degree``."""
        return Poly({m: c for m, c in self.terms.items() if dict(m).get(var, 0) <= max_degree}, _trusted=True)

    def content(self) -> Fraction:
        """Positive rational gcd of the coefficients (0 for the zero polynomial)."""
        from math import gcd

        num = 0
        den = 1
        for c in self.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, lc = self.leading_term()
        return self * (Fraction(1) / lc)

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        """Multivariate division by a single divisor in graded-lex order."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lm, lc = divisor.leading_term()
        ld = dict(lm)
        q: Dict[Monomial, Rational] = {}
        r: Dict[Monomial, Rational] = {}
        p = dict(self.terms)
        while p:
            m = max(p, key=grlex_key)
            c = p[m]
            dm = dict(m)
            if all(dm.get(v, 0) >= e for v, e in ld.items()):
                qm = mono_from_dict({v: dm.get(v, 0) - ld.get(v, 0) for v in set(dm) | set(ld)})
                qc = Fraction(c) / lc
                q[qm] = rat(qc)
                for mm, cc in divisor.terms.items():
                    t = mono_mul(qm, mm)
                    s = p.get(t, 0) - qc * cc
                    if s:
                        p[t] = s
                    else:
                        p.pop(t, None)
            else:
                r[m] = c
                del p[m]
        return Poly(q), Poly(r)

    def exact_div(self, divisor: "Poly") -> "Poly":
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise ArithmeticError(f"{divisor} does not divide {self}")
        return q


def poly_arith(op: str, a: Poly, b: Poly) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def horner(coeffs: Sequence[Poly], main: str) -> Poly:
    """Recombine ``coeff_vector`` output."""
    y = Poly.var(main)
    acc = Poly()
    for c in coeffs:
        acc = acc * y + c
    return acc


def check_budget(p: Poly, budget: int | None, where: str = "") -> Poly:
    if budget is not None and len(p.terms) > budget:
        raise BudgetExceeded(len(p.terms), budget, where)
    return p


# -- univariate gcd ----------------------------------------------------------


def univariate_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two polynomials in (at most) one common variable."""
    vs = a.variables() | b.variables()
    if len(vs) > 1:
        raise ValueError("univariate_gcd needs polynomials in one variable")
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


# -- rational functions -------------------------------------------------------


class RatFunc:
    """Quotient ``num/den`` of polynomials with ``den`` normalized to leading coefficient 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _normalized=False):
        num = Poly.coerce(num)
        den = Poly.const(1) if den is None else Poly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return RatFunc(Poly.coerce(x), _normalized=True)

    def is_poly(self) -> bool:
        return self.den == 1

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __add__(self, other):
        o = RatFunc.coerce(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        o = RatFunc.coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFunc.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __eq__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            other = RatFunc.coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        # only meaningful for polynomial values, whose form is canonical
        return hash((self.num, self.den))

    def subs(self, assignment) -> "RatFunc":
        den = self.den.subs(assignment)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes under substitution")
        return RatFunc(self.num.subs(assignment), den)

    def evaluate(self, assignment) -> Rational:
        d = self.den.evaluate(assignment)
        if not d:
            raise ZeroDivisionError("denominator vanishes at this point")
        return rat(Fraction(self.num.evaluate(assignment)) / d)

    def __repr__(self):
        return f"RatFunc({str(self)!r})"

    def __str__(self):
        if self.is_poly():
            return str(self.num)
        return f"({self.num})/({self.den})"


def _normalize(num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    if num.is_zero():
        return Poly(), Poly.const(1)
    if den.is_const():
        return num * (Fraction(1) / den.const_value()), Poly.const(1)
    nv, dv = num.variables(), den.variables()
    if len(nv | dv) == 1:
        g = univariate_gcd(num, den)
        if not g.is_const():
            num, den = num.exact_div(g), den.exact_div(g)
    else:
        q, r = num.divmod(den)
        if r.is_zero():
            return q, Poly.const(1)
    _, lc = den.leading_term()
    if lc != 1:
        inv = Fraction(1) / lc
        num, den = num * inv, den * inv
    if den.is_const():
        return num, Poly.const(1)
    return num, den


# -- matrices -----------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Rational]]) -> List[List[int]]:
    from math import lcm

    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        L = 1
        for x in fr:
            L = lcm(L, x.denominator)
        out.append([int(x * L) for x in fr])
    return out


def mat_rank(rows: Sequence[Sequence[Rational]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    a = _integer_rows(rows)
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    prev = 1
    col = 0
    while rank < m and col < n:
        pivot = next((i for i in range(rank, m) if a[i][col]), None)
        if pivot is None:
            col += 1
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, m):
            ai = a[i]
            f = ai[col]
            pr = a[rank]
            for j in range(col + 1, n):
                ai[j] = (p * ai[j] - f * pr[j]) // prev
            ai[col] = 0
        prev = p
        rank += 1
        col += 1
    return rank


def poly_rows(polys: Sequence[Poly]) -> Tuple[List[List[Rational]], List[Monomial]]:
    """Coefficient matrix of ``polys`` over the union of their monomials."""
    basis = sorted({m for p in polys for m in p.terms}, key=grlex_key, reverse=True)
    index = {m: i for i, m in enumerate(basis)}
    rows = []
    for p in polys:
        row = [0] * len(basis)
        for m, c in p.terms.items():
            row[index[m]] = c
        rows.append(row)
    return rows, basis


def poly_rank(polys: Sequence[Poly]) -> int:
    """Dimension of the Q-span of a list of polynomials."""
    rows, basis = poly_rows(polys)
    if not basis:
        return 0
    return mat_rank(rows)


def _berkowitz(A, zero, one) -> list:
    """Coefficients (highest degree first) of ``det(Y*I - A)`` over any commutative ring."""
    n = len(A)

    def dot(a, b):
        s = zero
        for x, y in zip(a, b):
            if x and y:
                s = s + x * y
        return s

    vec = [one, -A[0][0]]
    for k in range(1, n):
        R = A[k][:k]
        C = [A[i][k] for i in range(k)]
        M = [row[:k] for row in A[:k]]
        # Toeplitz column: 1, -a, -R C, -R M C, -R M^2 C, ...
        col = [one, -A[k][k]]
        v = C
        for _ in range(k):
            col.append(-dot(R, v))
            v = [dot(M[i], v) for i in range(k)]
        new = []
        for i in range(k + 2):
            s = zero
            for j in range(min(i, k) + 1):
                if i - j < len(col):
                    s = s + col[i - j] * vec[j]
            new.append(s)
        vec = new
    return vec


class _FlintBridge:
    """Conversion between :class:`Poly` and python-flint's ``fmpq_mpoly`` over fixed variables."""

    def __init__(self, polys: Sequence[Poly]):
        import flint

        self.flint = flint
        self.names = sorted({v for p in polys for v in p.variables()}, key=var_key) or ["_"]
        self.pos = {v: i for i, v in enumerate(self.names)}
        self.ctx = flint.fmpq_mpoly_ctx.get(tuple(self.names), "deglex")

    def to_flint(self, p: Poly):
        d = {}
        for m, c in p.terms.items():
            e = [0] * len(self.names)
            for v, k in m:
                e[self.pos[v]] = k
            c = Fraction(c)
            d[tuple(e)] = self.flint.fmpq(c.numerator, c.denominator)
        return self.ctx.from_dict(d)

    def from_flint(self, f) -> Poly:
        terms = {}
        for e, c in f.to_dict().items():
            m = tuple((self.names[i], int(k)) for i, k in enumerate(e) if k)
            terms[m] = rat(Fraction(int(c.p), int(c.q)))
        return Poly(terms, _trusted=True)

    def one(self):
        return self.ctx.from_dict({(0,) * len(self.names): 1})


def _flint_available() -> bool:
    try:
        import flint  # noqa: F401
    except ImportError:
        return False
    return True


def _flint_charpoly(A: List[List[Poly]]) -> List[Poly]:
    fb = _FlintBridge([x for row in A for x in row])
    B = [[fb.to_flint(x) for x in row] for row in A]
    return [fb.from_flint(c) for c in _berkowitz(B, fb.ctx.from_dict({}), fb.one())]


def product(polys: Sequence[Poly], backend: str = "auto") -> Poly:
    """Product of a list of polynomials; ``backend`` as for :func:`charpoly`."""
    polys = [Poly.coerce(p) for p in polys]
    if backend not in ("auto", "python", "flint"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "flint" or (backend == "auto" and _flint_available()):
        fb = _FlintBridge(polys)
        acc = fb.one()
        for p in polys:
            acc = acc * fb.to_flint(p)
        return fb.from_flint(acc)
    acc = Poly.const(1)
    for p in polys:
        acc = acc * p
    return acc


def charpoly(matrix: Sequence[Sequence[object]], var: str = "Y", backend: str = "auto") -> Poly:
    """``det(var*I - matrix)`` by Berkowitz's division-free algorithm.

    ``backend`` is ``"python"`` (this module's polynomials), ``"flint"`` (python-flint's
    multivariate polynomials, much faster on large entries) or ``"auto"``, which uses
    flint when it is importable.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("charpoly needs a square matrix")
    A = [[Poly.coerce(x) for x in row] for row in matrix]
    if n == 0:
        return Poly.const(1)
    if backend == "auto":
        backend = "flint" if _flint_available() else "python"
    if backend == "flint":
        vec = _flint_charpoly(A)
    elif backend == "python":
        vec = _berkowitz(A, Poly(), Poly.const(1))
    else:
        raise ValueError(f"unknown charpoly backend {backend!r}")
    y = Poly.var(var)
    out = Poly()
    for c in vec:
        out = out * y + c
    return out


# -- rendering and parsing ----------------------------------------------------


def render_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = format_rational(a)
        elif a == 1:
            body = format_monomial(m)
        else:
            body = f"{format_rational(a)}*{format_monomial(m)}"
        if i == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class PolyParseError(ValueError):
    pass


def parse_poly(text: str) -> Poly:
    """Parse the rendering grammar (and general +, -, *, /scalar, ^, parentheses)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif name is not None:
            tokens.append(("var", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        t = tokens[i]
        i += 1
        return t

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            f = power()
            if op == "*":
                acc = acc * f
            else:
                if not f.is_const() or f.is_zero():
                    raise PolyParseError("division only by nonzero scalars")
                acc = acc * (Fraction(1) / f.const_value())
        return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take()
            if kind != "num":
                raise PolyParseError("exponent must be a nonnegative integer")
            return base ** val
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return Poly.const(val)
        if kind == "var":
            return Poly.var(val)
        if (kind, val) == ("op", "("):
            e = expr()
            if take() != ("op", ")"):
                raise PolyParseError("missing closing parenthesis")
            return e
        if (kind, val) == ("op", "-"):
            return -atom()
        raise PolyParseError(f"unexpected token {val!r}")

    result = expr()
    if peek()[0] != "end":
        raise PolyParseError(f"trailing input at token {peek()[1]!r}")
    return result


def P(text: str) -> Poly:
    """Shorthand for :func:`parse_poly`."""
    return parse_poly(text)


def mat_inverse(rows: Sequence[Sequence[Rational]]) -> List[List[Rational]]:
    """Exact inverse by Gauss-Jordan over Q; raises ValueError when singular."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [[rat(x) for x in row[n:]] for row in a]


def independent_rows(rows: Sequence[Sequence[Rational]]) -> List[int]:
    """Indices of a greedy maximal set of linearly independent rows."""
    chosen: List[int] = []
    basis: List[List[Fraction]] = []
    pivots: List[int] = []
    for idx, row in enumerate(rows):
        v = [Fraction(x) for x in row]
        for b, pc in zip(basis, pivots):
            if v[pc]:
                f = v[pc] / b[pc]
                v = [x - f * y for x, y in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x), None)
        if pc is not None:
            basis.append(v)
            pivots.append(pc)
            chosen.append(idx)
    return chosen
