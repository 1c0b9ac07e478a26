"""Words over P = pi(1), T and their adjoints; bicyclic normal form; realizations."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from . import hardy
from .errors import DimensionMismatch, PiExtensionViolation

LETTERS = ("P", "Pstar", "T", "Tstar")
_STAR = {"P": "Pstar", "Pstar": "P", "T": "Tstar", "Tstar": "T"}
_PARSE = {"p": "P", "p*": "Pstar", "t": "T", "t*": "Tstar"}
_FORMAT = {v: k for k, v in _PARSE.items()}

PI_EXTENSION_TOL = 1e-8


@dataclass(frozen=True, order=True)
class BicyclicWord:
    """pi(n) pi*(m)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("bicyclic exponents are non-negative")

    def __mul__(self, other):
        return bicyclic_multiply(self, other)

    def star(self):
        return BicyclicWord(self.m, self.n)

    def to_word(self):
        if self.n == self.m == 0:
            # the identity, written as pi*(1) pi(1)
            return Word(("Pstar", "P"))
        return Word(("P",) * self.n + ("Pstar",) * self.m)


def bicyclic_multiply(a, b):
    # pi*(m1) pi(n2) collapses by pi*(1) pi(1) = 1
    c = min(a.m, b.n)
    return BicyclicWord(a.n + b.n - c, b.m + a.m - c)


def star(a):
    return a.star()


@dataclass(frozen=True)
class Word:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise ValueError("a word needs at least one letter")
        bad = [x for x in letters if x not in _STAR]
        if bad:
            raise ValueError(f"unknown letters {bad}; alphabet is {LETTERS}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __add__(self, other):
        return Word(self.letters + other.letters)

    def star(self):
        return Word(tuple(_STAR[x] for x in reversed(self.letters)))

    def __str__(self):
        return ".".join(_FORMAT[x] for x in self.letters)

    @classmethod
    def parse(cls, text):
        parts = [p.strip().lower() for p in text.split(".")]
        try:
            return cls(tuple(_PARSE[p] for p in parts))
        except KeyError as exc:
            raise ValueError(f"cannot parse word {text!r}: bad letter {exc}") from None


def all_words(max_len):
    for length in range(1, max_len + 1):
        for letters in itertools.product(LETTERS, repeat=length):
            yield Word(letters)


# ---------------------------------------------------------------------------
# realizations


@dataclass(frozen=True)
class Realization:
    P: hardy.TruncatedOperator
    T: hardy.TruncatedOperator
    name: str = "custom"

    def letter(self, x):
        return {"P": self.P, "T": self.T}[x.replace("star", "")]

    @functools.cached_property
    def operators(self):
        """Operator of each letter, adjoints included."""
        return {"P": self.P, "Pstar": hardy.adjoint(self.P),
                "T": self.T, "Tstar": hardy.adjoint(self.T)}


def shift_realization(n):
    p = hardy.shift_op(n, 1)
    return Realization(p, p, "shift")


def interleaved_realization(n):
    ext = hardy.interleaved_extension(n)
    return Realization(ext.pi1, ext.T, "interleaved")


def symbol_realization(phi, n, eps=1e-8):
    return Realization(hardy.shift_op(n, 1), hardy.toeplitz_op(phi, n, eps), "symbol")


def _check_pi_extension(real):
    if real.P.n != real.T.n:
        raise DimensionMismatch(f"P has size {real.P.n}, T has size {real.T.n}")
    gap = hardy.commutator_gap(real.P, real.T)
    if gap > PI_EXTENSION_TOL:
        raise PiExtensionViolation(f"commutator gap {gap:.3e} between pi(1) and T")


def _cancel_isometries(letters, real):
    # X* X = 1 whenever X is realized by an isometry
    out = []
    for x in letters:
        if out and out[-1] == _STAR[x] and out[-1].endswith("star") and real.letter(x).inner:
            out.pop()
        else:
            out.append(x)
    return out


def _ordered_product(ops):
    """Product of ops, grouping factors so the truncation stays exact where possible.

    Same-side Toeplitz runs merge first, then co-analytic/analytic junctions;
    whatever remains is multiplied left to right.  The operators are exact
    bounded operators, so any bracketing gives the same product.
    """
    ops = list(ops)

    def merge_first(pred):
        for i in range(len(ops) - 1):
            a, b = ops[i], ops[i + 1]
            if a.symbol is not None and b.symbol is not None and pred(a.kind, b.kind):
                ops[i:i + 2] = [hardy.compose(a, b)]
                return True
        return False

    while len(ops) > 1:
        if merge_first(lambda x, y: x == y):
            continue
        if merge_first(lambda x, y: (x, y) == (hardy.COANALYTIC, hardy.ANALYTIC)):
            continue
        break
    return hardy.compose_all(*ops)


def realize(w, realization, cancel=True):
    """Operator of a word: product of the letters' operators, left to right."""
    _check_pi_extension(realization)
    return _realize(w, realization, cancel)


def _realize(w, realization, cancel=True):
    letters = list(w.letters)
    if cancel:
        letters = _cancel_isometries(letters, realization)
    if not letters:
        return hardy.identity_op(realization.P.n)
    return _ordered_product([realization.operators[x] for x in letters])


@dataclass(frozen=True)
class InverseLawResult:
    passed: bool
    residual: float
    block: int
    certified: bool

    def to_dict(self):
        return {"pass": self.passed, "residual": self.residual, "block": self.block,
                "certified": self.certified}


def inverse_law_check(w, realization, tol=1e-7):
    """Spectral norm of W W* W - W on the leading block.

    On a certified product the block is the safe subspace.  When leakage
    across the window cannot be bounded the leading quarter is used and the
    result is marked uncertified.
    """
    _check_pi_extension(realization)
    lhs = _realize(w + w.star() + w, realization)
    rhs = _realize(w, realization)
    certified = lhs.certified and rhs.certified
    s = min(lhs.safe_dim, rhs.safe_dim)
    if not certified or s == 0:
        s = max(1, lhs.n // 4)
    diff = lhs.block(s) - rhs.block(s)
    residual = float(np.linalg.norm(diff, 2)) if np.any(diff) else 0.0
    return InverseLawResult(residual <= tol, residual, s, certified)


# ---------------------------------------------------------------------------
# normal form search


@dataclass(frozen=True)
class NormalFormReport:
    max_len: int
    words: int
    distinct_operators: int
    normal_forms: int
    matches: int
    misses: list
    tol: float

    @property
    def passed(self):
        return not self.misses

    def to_dict(self):
        return {
            "max_len": self.max_len, "words": self.words,
            "distinct_operators": self.distinct_operators,
            "normal_forms": self.normal_forms, "matches": self.matches,
            "misses": [str(w) for w in self.misses], "pass": self.passed,
        }


class _OperatorTable:
    """Deduplicates operators by a probe-vector fingerprint, confirmed on the matrix."""

    def __init__(self, n, tol, seed=0):
        rng = np.random.default_rng(seed)
        self.probe = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        self.tol = tol
        self.buckets = {}

    def _key(self, op):
        # leading quarter block only: it lies inside every safe block we compare
        k = len(self.probe) // 4
        value = op.matrix[:k, :k] @ self.probe[:k]
        return tuple(np.round(np.concatenate([value.real, value.imag]), 6))

    def find(self, op):
        for other, label in self.buckets.get(self._key(op), ()):
            s = min(op.safe_dim, other.safe_dim)
            if s and hardy.max_column_norm(op.block(s) - other.block(s)) <= self.tol:
                return label
        return None

    def add(self, op, label):
        if self.find(op) is None:
            self.buckets.setdefault(self._key(op), []).append((op, label))
            return True
        return False

    def __len__(self):
        return sum(len(v) for v in self.buckets.values())


def _normal_form_table(real, bound, tol):
    """All T^k T*^l pi(n) pi*(m) T^s T*^p with exponents <= bound, deduplicated stage by stage."""
    ident = hardy.identity_op(real.P.n)
    stages = [real.T, hardy.adjoint(real.T), real.P, hardy.adjoint(real.P),
              real.T, hardy.adjoint(real.T)]
    frontier = [(ident, ())]
    for factor in stages:
        table = _OperatorTable(real.P.n, tol)
        nxt = []
        for op, label in frontier:
            cur = op
            for e in range(bound + 1):
                if e:
                    cur = hardy.compose(cur, factor)
                if table.add(cur, label + (e,)):
                    nxt.append((cur, label + (e,)))
        frontier = nxt
    table = _OperatorTable(real.P.n, tol)
    for op, label in frontier:
        table.add(op, label)
    return table


def normal_form_conjecture_check(max_len, realization, tol=1e-10):
    """Does every word of length <= max_len equal some T^k T*^l pi(n) pi*(m) T^s T*^p?

    Words are explored breadth first with equal operators merged, so the
    work scales with the number of distinct operators, not 4**max_len.
    """
    _check_pi_extension(realization)
    forms = _normal_form_table(realization, max_len, tol)
    letters = realization.operators
    # each entry: (operator, one representative word, number of words realizing it)
    level = [(letters[x], Word((x,)), 1) for x in LETTERS]
    words = matches = distinct = 0
    misses = []
    for length in range(1, max_len + 1):
        for op, rep, count in level:
            words += count
            distinct += 1
            if forms.find(op) is not None:
                matches += count
            else:
                misses.append(rep)
        if length == max_len:
            break
        table = _OperatorTable(realization.P.n, tol)
        grouped = []
        for op, rep, count in level:
            for x in LETTERS:
                new = hardy.compose(op, letters[x])
                label = table.find(new)
                if label is None:
                    table.add(new, len(grouped))
                    grouped.append([new, rep + Word((x,)), count])
                else:
                    grouped[label][2] += count
        level = [tuple(g) for g in grouped]
    return NormalFormReport(max_len, words, distinct, len(forms), matches, misses, tol)


def match_normal_form(w, realization, bound, tol=1e-10):
    """Exponents (k, l, n, m, s, p) of a normal form equal to the word, or None."""
    forms = _normal_form_table(realization, bound, tol)
    return forms.find(realize(w, realization, cancel=False))
