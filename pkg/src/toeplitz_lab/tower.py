"""Euclid factorization of singular-inner Toeplitz operators, the tower T_{Phi_{1/n^k}}, and Gamma+.

Phi_a denotes the atom at 1 with mass a.  Masses add under multiplication, so
n k + m l = 1 gives Phi_{1/n} = Phi_1^k Phi_{m/n}^l, and the negative power
turns into an adjoint:

    case One (k > 0 > l):  T_{Phi_{1/n}} = (T*_{Phi_{m/n}})^{|l|} T_{Phi_1}^k
    case Two (k < 0 < l):  T_{Phi_{1/n}} = (T*_{Phi_1})^{|k|} T_{Phi_{m/n}}^l
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import hardy, regular_rep, symbols
from .errors import NotCoprime, SafeSubspaceEmpty, UnsupportedSignPattern

# junction sums need a longer symbol than plain products: at least FACTOR_MIN_LEN coefficients
FACTOR_PAD = 256
FACTOR_MIN_LEN = 1 << 18
SYMBOL_TOL = 1e-9


@dataclass(frozen=True)
class EuclidCertificate:
    m: int
    n: int
    k: int
    l: int
    case: str

    def __post_init__(self):
        if self.n * self.k + self.m * self.l != 1:
            raise ValueError(f"certificate fails: {self.n}*{self.k} + {self.m}*{self.l} != 1")

    def to_dict(self):
        return {"m": self.m, "n": self.n, "k": self.k, "l": self.l, "case": self.case}


def euclid_cert(m, n):
    """k, l with n k + m l = 1 and |k| minimal."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if math.gcd(m, n) != 1:
        raise NotCoprime(f"gcd({m}, {n}) = {math.gcd(m, n)}")
    if n == 1:
        # Phi_{1/n} is Phi_1 itself
        return EuclidCertificate(m, n, 1, 0, "Trivial")
    k0 = pow(n, -1, m) if m > 1 else 0
    # all solutions: k = k0 + j m
    k = min((k0, k0 - m), key=lambda v: (abs(v), -v))
    l = (1 - n * k) // m
    if k > 0 > l:
        case = "One"
    elif k < 0 < l:
        case = "Two"
    else:
        case = "Trivial"
    return EuclidCertificate(m, n, k, l, case)


def _junction_pad(n_modes, pad):
    return max(pad, -(-FACTOR_MIN_LEN // n_modes))


def _power_op(op, k):
    out = op
    for _ in range(k - 1):
        out = hardy.compose(out, op)
    return out


def _factor_operator(cert, n_modes, eps, pad):
    m, n, k, l = cert.m, cert.n, cert.k, cert.l
    t1 = hardy.toeplitz_op(symbols.singular(1.0), n_modes, eps, pad)
    tmn = hardy.toeplitz_op(symbols.singular(m / n), n_modes, eps, pad)
    if cert.case == "One":
        return hardy.compose(hardy.adjoint(_power_op(tmn, -l)), _power_op(t1, k))
    if cert.case == "Two":
        return hardy.compose(hardy.adjoint(_power_op(t1, -k)), _power_op(tmn, l))
    if k == 0:
        return _power_op(tmn, l)
    return _power_op(t1, k)


def intermediate_masses(cert):
    """Masses left after each adjoint factor is peeled off; all stay >= 1/n."""
    m, n, k, l = cert.m, cert.n, cert.k, cert.l
    if cert.case == "One":
        return [Fraction(k) - j * Fraction(m, n) for j in range(-l + 1)]
    if cert.case == "Two":
        return [l * Fraction(m, n) - j for j in range(-k + 1)]
    return [Fraction(1, n)]


def _symbol_residual(cert, length=1024):
    """Coefficient check of Phi_1^k Phi_{m/n}^l = Phi_{1/n} with negative powers moved across."""
    m, n, k, l = cert.m, cert.n, cert.k, cert.l
    one, frac = symbols.atom_coeffs(1.0, length), symbols.atom_coeffs(m / n, length)

    def product(factors):
        out = np.zeros(length, dtype=complex)
        out[0] = 1.0
        for f in factors:
            out = symbols.truncated_convolution(out, f, length)
        return out

    lhs = product([one] * max(k, 0) + [frac] * max(l, 0))
    rhs = product([symbols.atom_coeffs(1 / n, length)] + [one] * max(-k, 0) + [frac] * max(-l, 0))
    return float(np.linalg.norm(lhs - rhs))


@dataclass(frozen=True)
class FactorizationResult:
    certificate: EuclidCertificate
    residual: float
    defect_estimate: float
    safe_dim: int
    symbol_residual: float
    power_residual: float
    intermediate_masses: list
    passed: bool
    tol: float

    def to_dict(self):
        return {
            "certificate": self.certificate.to_dict(), "residual": self.residual,
            "defect_estimate": self.defect_estimate, "safe_dim": self.safe_dim,
            "symbol_residual": self.symbol_residual, "power_residual": self.power_residual,
            "intermediate_masses": [str(x) for x in self.intermediate_masses],
            "pass": self.passed, "tol": self.tol,
        }


def verify_factorization(cert, n_modes, eps=1e-8, pad=FACTOR_PAD):
    """Compare the Euclid product against T_{Phi_{1/n}} on the safe block; pass iff <= 100 eps."""
    pad = _junction_pad(n_modes, pad)
    if cert.n * cert.k + cert.m * cert.l != 1:
        raise ValueError("certificate identity fails")
    tol = 100 * eps
    sym = _symbol_residual(cert)
    if sym > SYMBOL_TOL:
        return FactorizationResult(cert, float("inf"), float("inf"), 0, sym, float("inf"),
                                   intermediate_masses(cert), False, tol)
    lhs = _factor_operator(cert, n_modes, eps, pad)
    if lhs.safe_dim == 0 or lhs.defect_bound > tol:
        raise SafeSubspaceEmpty(
            f"N={n_modes} leaves no block certified to {tol:g} (estimate {lhs.defect_bound:.2e})"
        )
    rhs = hardy.toeplitz_op(symbols.singular(1 / cert.n), n_modes, eps, pad)
    s = min(lhs.safe_dim, rhs.safe_dim)
    residual = hardy.max_column_norm(lhs.block(s) - rhs.block(s))
    # T_{Phi_{m/n}} = (T_{Phi_{1/n}})^m by plain matrix products
    base = rhs.matrix
    prod = np.linalg.matrix_power(base, cert.m)
    direct = hardy.toeplitz_op(symbols.singular(cert.m / cert.n), n_modes, eps, pad).matrix
    power = hardy.max_column_norm(prod - direct)
    return FactorizationResult(
        cert, residual, lhs.defect_bound, s, sym, power, intermediate_masses(cert),
        residual <= tol, tol,
    )


# ---------------------------------------------------------------------------
# tower


@dataclass(frozen=True)
class TowerLevel:
    k: int
    mass: Fraction
    n_modes: int
    operator: hardy.TruncatedOperator = field(repr=False)
    residual: float
    symbol_residual: float

    def to_dict(self):
        return {"k": self.k, "mass": str(self.mass), "residual": self.residual,
                "symbol_residual": self.symbol_residual}


@dataclass(frozen=True)
class TowerReport:
    n: int
    depth: int
    n_modes: int
    levels: list
    relations: dict
    tol: float

    @property
    def passed(self):
        return all(lv.residual <= self.tol for lv in self.levels) and self.relations["pass"]

    def to_dict(self):
        return {"experiment": "tower", "n": self.n, "depth": self.depth, "N": self.n_modes,
                "levels": [lv.to_dict() for lv in self.levels],
                "relations": self.relations, "pass": self.passed}


def build_tower(n, depth, n_modes, eps=1e-8, tol=1e-9):
    """Levels Phi_{1/n^k}, k = 0..depth; level k must equal the n-th power of level k+1."""
    if n < 2:
        raise ValueError("tower base must be at least 2")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    masses = [Fraction(1, n**k) for k in range(depth + 1)]
    ops = [hardy.toeplitz_op(symbols.singular(float(a)), n_modes, eps) for a in masses]
    levels = []
    for k, (a, op) in enumerate(zip(masses, ops)):
        if k == depth:
            levels.append(TowerLevel(k, a, n_modes, op, 0.0, 0.0))
            continue
        finer = ops[k + 1]
        # symbol level first: Phi_{1/n^{k+1}}^n against Phi_{1/n^k}
        fine = symbols.atom_coeffs(float(masses[k + 1]), n_modes)
        conv = fine
        for _ in range(n - 1):
            conv = symbols.truncated_convolution(conv, fine, n_modes)
        sym = float(np.linalg.norm(conv - op.symbol[:n_modes]))
        if sym > SYMBOL_TOL:
            levels.append(TowerLevel(k, a, n_modes, op, float("inf"), sym))
            continue
        # brute-force matrix power; lower triangular so the compression is exact
        prod = np.linalg.matrix_power(finer.matrix, n)
        levels.append(TowerLevel(k, a, n_modes, op, hardy.max_column_norm(prod - op.matrix), sym))
    return TowerReport(n, depth, n_modes, levels, tower_relations(n, depth, ops, masses), tol)


def tower_relations(n, depth, ops, masses):
    """Generator relations of the tower next to the same relations in the regular representation.

    Evidence only: matching relations on finite windows does not identify
    the inductive limit with the reduced semigroup algebra.
    """
    spec = regular_rep.SemigroupSpec.qn(n, depth)
    window = regular_rep.enumerate_window(spec, 2)
    ident = regular_rep.identity_map(len(window))
    rows = []
    ok = True
    for a, op in zip(masses, ops):
        x = regular_rep.rep_op(window, a)
        back = regular_rep.pb_compose(regular_rep.pb_star(x), x)
        # x* x is the identity on the domain of x, exactly
        dom = x.domain
        regular_ok = bool(np.array_equal(back.images[dom], ident.images[dom]))
        gram = hardy.compose(hardy.adjoint(op), op)
        s = gram.safe_dim
        residual = hardy.max_column_norm(gram.block(s) - np.eye(s)) if s else float("inf")
        within = residual <= gram.defect_bound + 1e-12
        ok = ok and regular_ok and within
        rows.append({"mass": str(a), "operator_residual": residual,
                     "defect_estimate": gram.defect_bound, "regular_exact": regular_ok})
    # pi(a) pi(b) = pi(a + b) in both pictures
    pairs = []
    for i in range(len(masses) - 1):
        a, b = masses[i], masses[i + 1]
        xa, xb = regular_rep.rep_op(window, a), regular_rep.rep_op(window, b)
        xab = regular_rep.rep_op(window, a + b)
        comp = regular_rep.pb_compose(xa, xb)
        dom = comp.domain
        regular_ok = bool(np.array_equal(comp.images[dom], xab.images[dom]))
        prod = ops[i].matrix @ ops[i + 1].matrix
        direct = hardy.toeplitz_op(symbols.singular(float(a + b)), ops[i].n).matrix
        residual = hardy.max_column_norm(prod - direct)
        ok = ok and regular_ok and residual <= 1e-9
        pairs.append({"a": str(a), "b": str(b), "operator_residual": residual,
                      "regular_exact": regular_ok})
    return {"isometry": rows, "additivity": pairs, "pass": ok,
            "note": "relation evidence, not an isomorphism proof"}


# ---------------------------------------------------------------------------
# Gamma+


@dataclass(frozen=True)
class GammaResult:
    m: int
    n: int
    case: str
    mass: float
    mass_uncertainty: float
    operator: hardy.TruncatedOperator = field(repr=False)
    residual: float
    defect_estimate: float
    passed: bool
    tol: float

    def to_dict(self):
        return {"m": self.m, "n": self.n, "case": self.case, "mass": self.mass,
                "mass_uncertainty": self.mass_uncertainty, "residual": self.residual,
                "defect_estimate": self.defect_estimate, "pass": self.passed}


def gamma_rep(m, n, t_interval, n_modes, eps=1e-8, tol=1e-6, pad=FACTOR_PAD):
    """Operator for m + n t in Gamma+, checked against T_{Phi_{m + n t}}.

    Both sides use the midpoint of the t interval, so the identity being
    tested does not depend on where t lies inside it.
    """
    t_lo, t_hi = (Fraction(x) for x in t_interval)
    pad = _junction_pad(n_modes, pad)
    spec = regular_rep.SemigroupSpec.gamma(t_lo, t_hi)
    if m <= 0 and n <= 0:
        raise UnsupportedSignPattern(f"m={m}, n={n}: no positive element has both coefficients <= 0")
    if spec.sign(regular_rep.GammaElement(m, n)) <= 0:
        raise UnsupportedSignPattern(f"{m} + {n} t is not positive")
    t = float((t_lo + t_hi) / 2)
    t1 = hardy.toeplitz_op(symbols.singular(1.0), n_modes, eps, pad)
    tt = hardy.toeplitz_op(symbols.singular(t), n_modes, eps, pad)
    if m >= 0 and n >= 0:
        case = "T^m_1 T^n_t"
        factors = ([_power_op(t1, m)] if m else []) + ([_power_op(tt, n)] if n else [])
        op = hardy.compose_all(*factors)
    elif m < 0:
        case = "(T*_1)^|m| T^n_t"
        op = hardy.compose(hardy.adjoint(_power_op(t1, -m)), _power_op(tt, n))
    else:
        case = "(T*_t)^|n| T^m_1"
        op = hardy.compose(hardy.adjoint(_power_op(tt, -n)), _power_op(t1, m))
    mass = m + n * t
    target = hardy.toeplitz_op(symbols.singular(mass), n_modes, eps, pad)
    s = min(op.safe_dim, target.safe_dim)
    if s == 0 or op.defect_bound > tol:
        raise SafeSubspaceEmpty(
            f"N={n_modes} leaves no block certified to {tol:g} (estimate {op.defect_bound:.2e})"
        )
    residual = hardy.max_column_norm(op.block(s) - target.block(s))
    uncertainty = abs(n) * float(t_hi - t_lo) / 2
    return GammaResult(m, n, case, mass, uncertainty, op, residual, op.defect_bound,
                       residual <= tol, tol)
