"""Polynomial identity testing between circuits and the explicit test-set sizes."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .algebra import BudgetExceeded
from .circuit import Circuit
from .errors import ArityMismatch, DivisionByZero
from .semantics import DEFAULT_MAX_TERMS, eval_mod, interpret

log = logging.getLogger(__name__)

PRIME_LO = 1 << 61
PRIME_HI = 1 << 62
MR_ROUNDS = 40
MAX_RETRIES = 16


def det_point_count(L: int) -> Tuple[int, int]:
    """Number of integer test points and their bit bound for nonscalar size ``L``."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    return 4 * (L + 2) ** 2 + 2, 2 * (L + 1)


def correctness_set_size(n: int) -> Tuple[int, int]:
    """Size and bit bound of the correctness set for the family in ``n`` inputs."""
    if n < 1:
        raise ValueError("n must be positive")
    return 16 * n * n + 2, 4 * n


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int, rounds: int = MR_ROUNDS, rng: Optional[random.Random] = None) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    rng = rng or random.Random(n)
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, lo: int = PRIME_LO, hi: int = PRIME_HI) -> int:
    while True:
        cand = rng.randrange(lo, hi) | 1
        if cand < hi and is_probable_prime(cand, rng=rng):
            return cand


class PointSource(Enum):
    DETERMINISTIC_1D = "Deterministic1D"
    CORRECTNESS_SET = "CorrectnessSet"
    RANDOM = "Random"


@dataclass
class TestPointSet:
    points: List[Tuple[int, ...]]
    bit_bound: int
    source: PointSource

    def __post_init__(self):
        for pt in self.points:
            for v in pt:
                if abs(v).bit_length() > self.bit_bound:
                    raise ValueError(f"coordinate {v} exceeds {self.bit_bound} bits")


def random_points(count: int, dim: int, bits: int, rng: random.Random, signed: bool = True) -> List[Tuple[int, ...]]:
    hi = 1 << bits
    lo = -hi + 1 if signed else 0
    return [tuple(rng.randrange(lo, hi) for _ in range(dim)) for _ in range(count)]


def deterministic_1d_points(L: int, rng: random.Random) -> TestPointSet:
    m, bits = det_point_count(L)
    return TestPointSet(random_points(m, 1, bits, rng, signed=False), bits, PointSource.DETERMINISTIC_1D)


def correctness_points(n: int, rng: random.Random) -> TestPointSet:
    K, bits = correctness_set_size(n)
    return TestPointSet(random_points(K, n, bits, rng), bits, PointSource.CORRECTNESS_SET)


class Verdict(Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


@dataclass
class Witness:
    params: Tuple[int, ...]
    inputs: Tuple[int, ...]
    prime: int
    left: List[int]
    right: List[int]

    def as_dict(self):
        return {"params": list(self.params), "inputs": list(self.inputs), "prime": self.prime,
                "left": self.left, "right": self.right}


@dataclass
class EquivResult:
    verdict: Verdict
    mode: str
    witness: Optional[Witness] = None
    trials_run: int = 0
    trials_skipped: int = 0
    notes: List[str] = field(default_factory=list)


def confirm_witness(c1: Circuit, c2: Circuit, w: Witness) -> bool:
    """Re-evaluate both circuits at a stored witness; True iff they really differ there."""
    try:
        a = eval_mod(c1, w.params, w.inputs, w.prime)
        b = eval_mod(c2, w.params, w.inputs, w.prime)
    except DivisionByZero:
        return False
    return a == w.left and b == w.right and a != b


def equiv(
    c1: Circuit,
    c2: Circuit,
    mode: str = "exact",
    trials: int = 8,
    rng: Optional[random.Random] = None,
    max_terms: Optional[int] = DEFAULT_MAX_TERMS,
) -> EquivResult:
    if (c1.r, c1.n, len(c1.outputs)) != (c2.r, c2.n, len(c2.outputs)):
        raise ArityMismatch(
            f"circuits differ in shape: (r,n,outputs) {(c1.r, c1.n, len(c1.outputs))} vs {(c2.r, c2.n, len(c2.outputs))}"
        )
    if mode == "exact":
        try:
            f1 = interpret(c1, max_terms=max_terms).finals
            f2 = interpret(c2, max_terms=max_terms).finals
        except BudgetExceeded as e:
            return EquivResult(Verdict.UNKNOWN, mode, notes=[str(e)])
        same = all(a == b for a, b in zip(f1, f2))
        return EquivResult(Verdict.EQUAL if same else Verdict.DISTINCT, mode)
    if mode != "modular":
        raise ValueError(f"unknown mode {mode!r}")
    rng = rng or random.Random()
    res = EquivResult(Verdict.EQUAL, mode)
    for t in range(trials):
        p = random_prime(rng)
        for attempt in range(MAX_RETRIES + 1):
            u = tuple(rng.randrange(p) for _ in range(c1.r))
            x = tuple(rng.randrange(p) for _ in range(c1.n))
            try:
                a = eval_mod(c1, u, x, p)
                b = eval_mod(c2, u, x, p)
            except DivisionByZero:
                continue
            break
        else:
            res.trials_skipped += 1
            msg = f"trial {t}: division by zero at {MAX_RETRIES + 1} sampled points mod {p}, skipped"
            log.warning(msg)
            res.notes.append(msg)
            continue
        res.trials_run += 1
        if a != b:
            w = Witness(u, x, p, a, b)
            if confirm_witness(c1, c2, w):
                res.verdict = Verdict.DISTINCT
                res.witness = w
                return res
    if res.trials_run == 0:
        res.verdict = Verdict.UNKNOWN
    return res
