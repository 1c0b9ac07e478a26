"""Inner functions as structured symbols.

An inner function is stored in factored form

    phi(z) = z**p * prod_a b_a(z)**mult * prod_xi exp(mass * (xi + z) / (z - xi))

with a finite list of Blaschke zeros inside the disk and a finite list of
atoms on the circle.  Each Blaschke factor is normalised so that

    b_a(z) = (|a| / a) * (a - z) / (1 - conj(a) z),     b_a(0) = |a| > 0,

and the atom at xi = 1 with mass t is the function with value exp(-t) at the
origin.  Taylor coefficients come from per-factor closed forms combined by
truncated convolution; an independent route samples the function on an inner
circle and runs an FFT.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import EvaluationAtAtom, TailNotResolved

ATOM_MERGE_TOL = 1e-12
ATOM_EVAL_TOL = 1e-9
# exp(-t) * L_k(2t) stays O(1), but L_k itself grows like exp(t)
MAX_ATOM_MASS = 300.0


class SymbolClass(enum.Enum):
    FINITE_BLASCHKE = "FiniteBlaschke"
    HAS_SINGULAR_PART = "HasSingularPart"


@dataclass(frozen=True)
class InnerFunction:
    monomial_order: int = 0
    blaschke_zeros: tuple = ()
    singular_atoms: tuple = ()

    def __post_init__(self):
        order = int(self.monomial_order)
        if order < 0:
            raise ValueError("monomial_order must be non-negative")
        zeros = []
        for a, mult in self.blaschke_zeros:
            a, mult = complex(a), int(mult)
            if mult <= 0:
                raise ValueError(f"multiplicity must be positive, got {mult}")
            if abs(a) >= 1:
                raise ValueError(f"Blaschke zero {a} is not inside the unit disk")
            if a == 0:
                order += mult
                continue
            zeros.append((a, mult))
        atoms = []
        for xi, mass in self.singular_atoms:
            xi, mass = complex(xi), float(mass)
            if abs(abs(xi) - 1) > 1e-12:
                raise ValueError(f"atom point {xi} is not on the unit circle")
            if not mass > 0:
                raise ValueError(f"atom mass must be positive, got {mass}")
            if mass > MAX_ATOM_MASS:
                raise OverflowError(f"atom mass {mass} exceeds {MAX_ATOM_MASS}")
            atoms.append((xi, mass))
        object.__setattr__(self, "monomial_order", order)
        object.__setattr__(self, "blaschke_zeros", tuple(zeros))
        object.__setattr__(self, "singular_atoms", _merge_atoms(atoms))

    def __mul__(self, other):
        if not isinstance(other, InnerFunction):
            return NotImplemented
        return multiply(self, other)

    def __call__(self, z):
        return evaluate(self, z)

    def value_at_zero_without_monomial(self):
        """B1(0) * S(0): the inner function with its z**p factor removed, at 0."""
        value = complex(1.0)
        for a, mult in self.blaschke_zeros:
            value *= abs(a) ** mult
        for _, mass in self.singular_atoms:
            value *= math.exp(-mass)
        return value

    def to_dict(self):
        return {
            "monomial_order": self.monomial_order,
            "blaschke_zeros": [[a.real, a.imag, m] for a, m in self.blaschke_zeros],
            "singular_atoms": [[xi.real, xi.imag, t] for xi, t in self.singular_atoms],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(
            monomial_order=int(data.get("monomial_order", 0)),
            blaschke_zeros=tuple(
                (complex(re, im), int(m)) for re, im, m in data.get("blaschke_zeros", [])
            ),
            singular_atoms=tuple(
                (complex(re, im), float(t)) for re, im, t in data.get("singular_atoms", [])
            ),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _merge_atoms(atoms):
    merged = []
    for xi, mass in atoms:
        for i, (other, total) in enumerate(merged):
            if abs(other - xi) <= ATOM_MERGE_TOL:
                merged[i] = (other, total + mass)
                break
        else:
            merged.append((xi, mass))
    return tuple(merged)


def monomial(p):
    return InnerFunction(monomial_order=p)


def blaschke(*zeros):
    """Finite Blaschke product with simple zeros (repeat a zero for multiplicity)."""
    counts = {}
    for a in zeros:
        counts[complex(a)] = counts.get(complex(a), 0) + 1
    return InnerFunction(blaschke_zeros=tuple(counts.items()))


def singular(mass, point=1.0):
    """Atomic singular inner function; ``singular(t)`` is Phi_t with Phi_t(0) = e^{-t}."""
    return InnerFunction(singular_atoms=((complex(point), mass),))


# ---------------------------------------------------------------------------
# evaluation


def evaluate(phi, z):
    """Evaluate phi at a point (or array of points) of the closed disk."""
    z_arr = np.asarray(z, dtype=complex)
    on_circle = np.abs(np.abs(z_arr) - 1) <= 1e-12
    if np.any(np.abs(z_arr) > 1 + 1e-12):
        raise ValueError("evaluation point outside the closed unit disk")
    value = z_arr ** phi.monomial_order
    for a, mult in phi.blaschke_zeros:
        factor = (abs(a) / a) * (a - z_arr) / (1 - np.conj(a) * z_arr)
        value = value * factor**mult
    for xi, mass in phi.singular_atoms:
        near = np.abs(z_arr - xi) <= ATOM_EVAL_TOL
        if np.any(near & on_circle):
            raise EvaluationAtAtom(f"point on the circle within {ATOM_EVAL_TOL} of atom {xi}")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            exponent = mass * (xi + z_arr) / (z_arr - xi)
            factor = np.exp(exponent)
        # radial limit at the atom is 0 from inside the disk
        factor = np.where(near, 0.0, factor)
        value = value * factor
    if np.ndim(z) == 0:
        return complex(value)
    return value


# ---------------------------------------------------------------------------
# Fourier (Taylor) coefficients


@dataclass(frozen=True)
class FourierSeries:
    """Truncated analytic coefficients c_0..c_{N-1} with a certified tail bound."""

    coeffs: np.ndarray = field(repr=False)
    tail_bound: float

    def __len__(self):
        return len(self.coeffs)

    @property
    def energy(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    @classmethod
    def from_inner_coeffs(cls, coeffs):
        """Attach the tail bound sqrt(1 - sum |c_k|^2), valid for unit-norm symbols."""
        coeffs = np.asarray(coeffs, dtype=complex)
        energy = float(np.sum(np.abs(coeffs) ** 2))
        return cls(coeffs, math.sqrt(max(0.0, 1.0 - energy)))


@functools.lru_cache(maxsize=64)
def _laguerre_steps(x, n):
    # L_k(x) - L_{k-1}(x) for k < n, with L_{-1} = 0
    out = np.empty(n)
    prev, cur = 0.0, 1.0
    for k in range(n):
        out[k] = cur - prev
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    out.setflags(write=False)
    return out


def atom_coeffs(mass, n, point=1.0):
    """Taylor coefficients of exp(mass (xi + z)/(z - xi)) from the Laguerre generating function."""
    if mass > MAX_ATOM_MASS:
        raise OverflowError(f"atom mass {mass} exceeds {MAX_ATOM_MASS}")
    coeffs = math.exp(-mass) * _laguerre_steps(float(2 * mass), int(n)).astype(complex)
    xi = complex(point)
    if xi != 1:
        coeffs *= np.conj(xi) ** np.arange(n)
    return coeffs


def blaschke_factor_coeffs(a, n):
    """Coefficients of (|a|/a)(a - z)/(1 - conj(a) z): |a|, then (|a|/a) conj(a)^{k-1} (|a|^2 - 1)."""
    a = complex(a)
    out = np.empty(n, dtype=complex)
    out[0] = abs(a)
    if n > 1:
        k = np.arange(1, n)
        out[1:] = (abs(a) / a) * np.conj(a) ** (k - 1) * (abs(a) ** 2 - 1)
    return out


def truncated_convolution(a, b, n):
    """First n coefficients of the Cauchy product of two coefficient sequences."""
    a = np.asarray(a, dtype=complex)[:n]
    b = np.asarray(b, dtype=complex)[:n]
    if min(len(a), len(b)) < 64:
        full = np.convolve(a, b)
    else:
        full = fftconvolve(a, b)
    out = np.zeros(n, dtype=complex)
    m = min(n, len(full))
    out[:m] = full[:m]
    return out


def fourier_coeffs(phi, n):
    """Taylor coefficients c_0..c_{n-1} of phi with tail bound sqrt(1 - sum |c_k|^2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return FourierSeries.from_inner_coeffs(_raw_coeffs(phi, n))


def _raw_coeffs(phi, n):
    coeffs = np.zeros(n, dtype=complex)
    p = phi.monomial_order
    if p >= n:
        return coeffs
    m = n - p
    body = np.zeros(m, dtype=complex)
    body[0] = 1.0
    for a, mult in phi.blaschke_zeros:
        factor = blaschke_factor_coeffs(a, m)
        for _ in range(mult):
            body = truncated_convolution(body, factor, m)
    for xi, mass in phi.singular_atoms:
        body = truncated_convolution(body, atom_coeffs(mass, m, xi), m)
    coeffs[p:] = body
    return coeffs


def fourier_coeffs_sampled(phi, n, radius=0.9, samples=None):
    """Independent oracle: FFT of phi on the circle |z| = radius, rescaled by radius**-k.

    Roundoff is amplified by radius**-k, so the useful range of k is about
    log(1e8) / -log(radius) when 1e-8 agreement is wanted.
    """
    if samples is None:
        # aliasing from index k + M is damped by radius**M
        needed = math.log(1e-18) / math.log(radius)
        samples = 1 << max(int(math.ceil(math.log2(max(needed, 2 * n)))), 4)
    theta = 2 * np.pi * np.arange(samples) / samples
    values = evaluate(phi, radius * np.exp(1j * theta))
    spectrum = np.fft.fft(values) / samples
    k = np.arange(n)
    return spectrum[:n] / radius**k


# ---------------------------------------------------------------------------
# algebra


def multiply(a, b):
    return InnerFunction(
        monomial_order=a.monomial_order + b.monomial_order,
        blaschke_zeros=_merge_zeros(a.blaschke_zeros + b.blaschke_zeros),
        singular_atoms=a.singular_atoms + b.singular_atoms,
    )


def _merge_zeros(zeros):
    merged = {}
    for a, mult in zeros:
        merged[a] = merged.get(a, 0) + mult
    return tuple(merged.items())


def power(phi, k):
    if k < 1:
        raise ValueError("power needs a positive integer exponent")
    return InnerFunction(
        monomial_order=phi.monomial_order * k,
        blaschke_zeros=tuple((a, m * k) for a, m in phi.blaschke_zeros),
        singular_atoms=tuple((xi, t * k) for xi, t in phi.singular_atoms),
    )


def classify(phi):
    if phi.singular_atoms:
        return SymbolClass.HAS_SINGULAR_PART
    return SymbolClass.FINITE_BLASCHKE


def tail_energies(coeffs):
    """tail[D] = sum_{k > D} |c_k|^2, including the mass beyond the array (unit norm)."""
    power_ = np.abs(np.asarray(coeffs)) ** 2
    beyond = max(0.0, 1.0 - float(np.sum(power_)))
    suffix = np.cumsum(power_[::-1])[::-1]
    tail = np.empty_like(power_)
    tail[:-1] = suffix[1:]
    tail[-1] = 0.0
    return tail + beyond


def effective_degree(phi, eps, nmax):
    """Smallest D <= nmax whose coefficient tail beyond D has l2 norm <= eps."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if phi.monomial_order <= nmax and not phi.blaschke_zeros and not phi.singular_atoms:
        return phi.monomial_order
    tail = np.sqrt(tail_energies(_raw_coeffs(phi, nmax + 1)))
    hits = np.nonzero(tail <= eps)[0]
    if len(hits) == 0:
        raise TailNotResolved(
            f"tail beyond degree {nmax} is {tail[-1]:.3e} > eps={eps:g}"
        )
    return int(hits[0])
