"""Regular representations of totally ordered semigroups as partial bijections.

Every check here is exact: elements are integers, rationals, or integer
pairs (m, q) standing for m + q t, and partial maps are integer index arrays.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import hardy
from .errors import ConfigError, ElementOutsideWindow, IndeterminateSign

UNDEFINED = -1


@dataclass(frozen=True, order=True)
class GammaElement:
    """m + q t."""

    m: int
    q: int

    def __add__(self, other):
        return GammaElement(self.m + other.m, self.q + other.q)

    def __sub__(self, other):
        return GammaElement(self.m - other.m, self.q - other.q)

    def __str__(self):
        if self.q == 0:
            return str(self.m)
        t = "t" if abs(self.q) == 1 else f"{abs(self.q)}t"
        if self.m == 0:
            return t if self.q > 0 else f"-{t}"
        return f"{self.m}{'+' if self.q > 0 else '-'}{t}"


@dataclass(frozen=True)
class SemigroupSpec:
    variant: str
    base: int = 2
    depth: int = 0
    t_lo: Fraction = Fraction(0)
    t_hi: Fraction = Fraction(0)

    def __post_init__(self):
        if self.variant not in ("zplus", "qn", "gamma"):
            raise ConfigError(f"unknown semigroup variant {self.variant!r}")
        if self.variant == "qn" and (self.base < 2 or self.depth < 0):
            raise ConfigError("Qn needs base >= 2 and depth >= 0")
        if self.variant == "gamma":
            object.__setattr__(self, "t_lo", Fraction(self.t_lo))
            object.__setattr__(self, "t_hi", Fraction(self.t_hi))
            if not 0 < self.t_lo <= self.t_hi:
                raise ConfigError("Gamma needs 0 < t_lo <= t_hi")

    # -- construction -----------------------------------------------------
    @classmethod
    def zplus(cls):
        return cls("zplus")

    @classmethod
    def qn(cls, base, depth):
        return cls("qn", base=base, depth=depth)

    @classmethod
    def gamma(cls, t_lo, t_hi):
        return cls("gamma", t_lo=Fraction(t_lo), t_hi=Fraction(t_hi))

    @classmethod
    def from_dict(cls, data):
        variant = str(data.get("variant", "")).lower()
        try:
            if variant == "zplus":
                return cls.zplus()
            if variant == "qn":
                return cls.qn(int(data["base"]), int(data["depth"]))
            if variant == "gamma":
                return cls.gamma(Fraction(*data["t_lo"]), Fraction(*data["t_hi"]))
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad semigroup spec {data!r}: {exc}") from None
        raise ConfigError(f"unknown semigroup variant {variant!r}")

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        if self.variant == "qn":
            return {"variant": "qn", "base": self.base, "depth": self.depth}
        if self.variant == "gamma":
            return {"variant": "gamma",
                    "t_lo": [self.t_lo.numerator, self.t_lo.denominator],
                    "t_hi": [self.t_hi.numerator, self.t_hi.denominator]}
        return {"variant": "zplus"}

    @property
    def label(self):
        return {"zplus": "Z+", "qn": f"Q+({self.base})", "gamma": "Gamma+"}[self.variant]

    # -- exact arithmetic on elements -------------------------------------
    def sign(self, x):
        """Exact sign of an element (or of a difference of elements)."""
        if self.variant != "gamma":
            return (x > 0) - (x < 0)
        if x.q == 0:
            return (x.m > 0) - (x.m < 0)
        ends = (x.m + x.q * self.t_lo, x.m + x.q * self.t_hi)
        lo, hi = min(ends), max(ends)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        raise IndeterminateSign(
            f"sign of {x} undecided for t in [{self.t_lo}, {self.t_hi}]; tighten the interval"
        )

    def compare(self, a, b):
        return self.sign(a - b)

    def value(self, x):
        """Float value for reports (midpoint t for Gamma)."""
        if self.variant == "gamma":
            return float(x.m + x.q * (self.t_lo + self.t_hi) / 2)
        return float(x)

    def zero(self):
        return GammaElement(0, 0) if self.variant == "gamma" else Fraction(0)


@dataclass(frozen=True)
class Window:
    spec: SemigroupSpec
    bound: Fraction
    elements: tuple
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.index


def enumerate_window(spec, bound, search_bound=None):
    """All semigroup elements with value in [0, bound], exactly ordered.

    For Gamma the candidates are m + q t with |m|, |q| <= search_bound
    (default ceil(bound)).
    """
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("window bound must be positive")
    if spec.variant == "zplus":
        elements = [Fraction(k) for k in range(math.floor(bound) + 1)]
    elif spec.variant == "qn":
        scale = spec.base**spec.depth
        elements = [Fraction(k, scale) for k in range(math.floor(bound * scale) + 1)]
    else:
        limit = math.ceil(bound) if search_bound is None else int(search_bound)
        elements = []
        for m in range(-limit, limit + 1):
            for q in range(-limit, limit + 1):
                x = GammaElement(m, q)
                # x - bound keeps a rational m-part; sign() handles it exactly
                if spec.sign(x) >= 0 and spec.sign(GammaElement(m - bound, q)) <= 0:
                    elements.append(x)
        elements.sort(key=functools.cmp_to_key(spec.compare))
    elements = tuple(elements)
    return Window(spec, bound, elements, {x: i for i, x in enumerate(elements)})


@dataclass(frozen=True, eq=False)
class PartialBij:
    """Injective partial map on window indices; images[i] == -1 where undefined."""

    images: np.ndarray = field(repr=False)

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.int64)
        defined = images[images != UNDEFINED]
        if len(np.unique(defined)) != len(defined):
            raise ValueError("partial map is not injective")
        images.setflags(write=False)
        object.__setattr__(self, "images", images)

    def __eq__(self, other):
        return isinstance(other, PartialBij) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __len__(self):
        return len(self.images)

    @property
    def domain(self):
        return np.nonzero(self.images != UNDEFINED)[0]

    def pairs(self):
        return [(int(i), int(j)) for i, j in enumerate(self.images) if j != UNDEFINED]


def identity_map(size):
    return PartialBij(np.arange(size))


def rep_op(window, a):
    """c -> a + c on the window elements whose sum stays in the window."""
    if a not in window:
        raise ElementOutsideWindow(a)
    images = np.full(len(window), UNDEFINED, dtype=np.int64)
    for i, c in enumerate(window.elements):
        images[i] = window.index.get(a + c, UNDEFINED)
    return PartialBij(images)


def pb_star(x):
    inverse = np.full(len(x), UNDEFINED, dtype=np.int64)
    dom = x.domain
    inverse[x.images[dom]] = dom
    return PartialBij(inverse)


def pb_compose(x, y):
    """x after y."""
    if len(x) != len(y):
        raise ValueError("partial maps live on different windows")
    out = np.full(len(y), UNDEFINED, dtype=np.int64)
    dom = y.domain
    out[dom] = x.images[y.images[dom]]
    return PartialBij(out)


def matrix_of(x):
    """0/1 matrix with entry (image, preimage) = 1: an exact partial isometry."""
    n = len(x)
    matrix = np.zeros((n, n), dtype=complex)
    dom = x.domain
    matrix[x.images[dom], dom] = 1.0
    offsets = x.images[dom] - dom
    down = int(offsets.max()) if len(dom) else 0
    up = int(-offsets.min()) if len(dom) else 0
    return hardy.TruncatedOperator(matrix, n, down=down, up=up)


@dataclass(frozen=True)
class Theorem1Report:
    semigroup: str
    window_size: int
    samples: int
    word_len: int
    seed: int
    law_failures: int
    idempotent_failures: int
    order_failures: int
    min_domain_fraction: float
    mean_domain_fraction: float

    @property
    def passed(self):
        return self.law_failures == self.idempotent_failures == self.order_failures == 0

    def to_dict(self):
        return {
            "semigroup": self.semigroup, "window_size": self.window_size,
            "samples": self.samples, "word_len": self.word_len, "seed": self.seed,
            "law_failures": self.law_failures,
            "idempotent_failures": self.idempotent_failures,
            "order_failures": self.order_failures,
            "min_domain_fraction": self.min_domain_fraction,
            "mean_domain_fraction": self.mean_domain_fraction, "pass": self.passed,
        }


def order_failures(window):
    """Pairs where 'b = a + c for some window c' disagrees with the window order."""
    failures = 0
    for i, a in enumerate(window.elements):
        for j, b in enumerate(window.elements):
            c = b - a
            if c in window and j < i:
                failures += 1
            if j >= i and window.spec.sign(c) < 0:
                failures += 1
    return failures


def theorem1_check(spec, bound, word_len=6, samples=1000, seed=0, search_bound=None):
    """Sample words over rep_op(g) and their inverses; verify x x* x = x and friends exactly."""
    window = enumerate_window(spec, bound, search_bound)
    gens = [rep_op(window, g) for g in window.elements]
    letters = gens + [pb_star(g) for g in gens]
    rng = np.random.default_rng(seed)
    words = []
    for _ in range(samples):
        length = int(rng.integers(1, word_len + 1))
        picks = rng.integers(0, len(letters), size=length)
        x = letters[picks[0]]
        for p in picks[1:]:
            x = pb_compose(x, letters[p])
        words.append(x)
    law = 0
    for x in words:
        xs = pb_star(x)
        if pb_compose(x, pb_compose(xs, x)) != x or pb_compose(xs, pb_compose(x, xs)) != xs:
            law += 1
    idem = 0
    for x, y in zip(words, words[1:] + words[:1]):
        e, f = pb_compose(x, pb_star(x)), pb_compose(y, pb_star(y))
        if pb_compose(e, f) != pb_compose(f, e):
            idem += 1
    fractions_ = [len(x.domain) / len(window) for x in words]
    return Theorem1Report(
        spec.label, len(window), samples, word_len, seed, law, idem,
        order_failures(window), min(fractions_), float(np.mean(fractions_)),
    )
