"""Truncated Hardy space: vectors, analytic Toeplitz operators and their adjoints.

Truncation model
----------------
A ``TruncatedOperator`` of size N stores the compression ``P A P`` of an
operator ``A`` on H^2 to the first N Fourier modes.  ``safe_dim = s`` means the
leading s x s block of the matrix equals the compression of ``A`` to the first
s modes, up to ``defect_bound`` in operator norm.

Compressions are not multiplicative in general: ``P A B P`` differs from
``(P A P)(P B P)`` by ``P A Q B P`` (Q = I - P).  That term vanishes when B
cannot move a vector of the block below the window (finite downward reach) or
when A cannot pull mass from below the window into the block (finite upward
reach).  ``compose`` shrinks the safe block by the finite reach.  Analytic
(lower triangular) factors on the left and co-analytic (upper triangular)
factors on the right never lose anything.

The remaining case, a co-analytic operator T_f^* followed by an analytic
T_g, is a two-sided Toeplitz operator whose diagonals are the absolutely
convergent correlations sum_m conj(f_m) g_{m+d}.  Symbols are carried with a
long padded coefficient array so these sums are evaluated far past N; when
both sequences are infinite the sum is smoothly tapered and its error estimated
by halving the padding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.linalg import toeplitz as _toeplitz

from . import symbols
from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotAnIsometry,
    NotCommuting,
    SafeSubspaceEmpty,
    SymbolMismatch,
)

ANALYTIC = "analytic"
COANALYTIC = "coanalytic"

# padded symbol length is max(DEFAULT_PAD * N, MIN_PAD_LEN)
DEFAULT_PAD = 128
MIN_PAD_LEN = 4096
# error(K) <= diff(K/2, K) / (2^(1/4) - 1) for sums converging at least like K^(-1/4);
# the true rate is K^(-1/2) or faster but is reached slowly when the masses are equal
_RICHARDSON = 1.0 / (2.0**0.25 - 1.0)


@dataclass(frozen=True)
class HardyVector:
    """Coordinates in e_0..e_{N-1} plus the norm of everything beyond the window."""

    coeffs: np.ndarray = field(repr=False)
    tail: float = 0.0
    defect: float = 0.0

    @property
    def n(self):
        return len(self.coeffs)

    def norm(self):
        return math.hypot(float(np.linalg.norm(self.coeffs)), self.tail)

    def head_norm(self):
        return float(np.linalg.norm(self.coeffs))


def basis_vector(n, k):
    if not 0 <= k < n:
        raise IndexError(f"basis index {k} outside window of size {n}")
    coeffs = np.zeros(n, dtype=complex)
    coeffs[k] = 1.0
    return HardyVector(coeffs)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    matrix: np.ndarray = field(repr=False)
    safe_dim: int
    defect_bound: float = 0.0
    # max(i - j) and max(j - i) over nonzero entries of the untruncated operator;
    # None means unbounded
    down: int | None = None
    up: int | None = None
    norm_bound: float = 1.0
    kind: str | None = None
    symbol: np.ndarray | None = field(default=None, repr=False)
    symbol_exact: bool = False
    inner: bool = False
    fixes_tail: bool = False
    certified: bool = True

    @property
    def n(self):
        return self.matrix.shape[0]

    def block(self, s=None):
        s = self.safe_dim if s is None else s
        return self.matrix[:s, :s]

    def to_dict(self):
        rows = [[float(x) for v in row for x in (v.real, v.imag)] for row in self.matrix]
        return {"n": self.n, "safe_dim": self.safe_dim, "defect": self.defect_bound, "rows": rows}


def _add(x, y):
    if x is None or y is None:
        return None
    return x + y


def _lower_toeplitz(column, n):
    col = np.zeros(n, dtype=complex)
    m = min(n, len(column))
    col[:m] = column[:m]
    return _toeplitz(col, np.zeros(n, dtype=complex))


def padded_length(n, pad=DEFAULT_PAD):
    return max(pad * n, MIN_PAD_LEN)


def identity_op(n, scale=1.0):
    return TruncatedOperator(
        np.eye(n, dtype=complex) * scale, n, down=0, up=0, norm_bound=abs(scale),
        fixes_tail=scale == 1.0,
    )


def shift_op(n, k=1):
    """pi_0(k): e_j -> e_{j+k}."""
    if not 0 <= k < n:
        raise ValueError(f"shift power {k} must satisfy 0 <= k < N={n}")
    symbol = np.zeros(k + 1, dtype=complex)
    symbol[k] = 1.0
    return TruncatedOperator(
        np.eye(n, k=-k, dtype=complex), n, down=k, up=-k, kind=ANALYTIC,
        symbol=symbol, symbol_exact=True, inner=True, fixes_tail=k == 0,
    )


def toeplitz_op(phi, n, eps=1e-8, pad=DEFAULT_PAD):
    """Analytic Toeplitz operator T_phi compressed to n modes.

    ``eps`` is recorded as the accuracy budget of checks built on this
    operator; the compression itself is exact for a lower triangular matrix.
    """
    if not phi.blaschke_zeros and not phi.singular_atoms:
        if phi.monomial_order >= n:
            raise ValueError("monomial order exceeds the truncation")
        op = shift_op(n, phi.monomial_order)
        return replace(op, defect_bound=0.0)
    length = padded_length(n, pad)
    coeffs = symbols.fourier_coeffs(phi, length).coeffs
    coeffs.setflags(write=False)
    return TruncatedOperator(
        _lower_toeplitz(coeffs, n), n, down=None, up=-phi.monomial_order,
        kind=ANALYTIC, symbol=coeffs, inner=True,
    )


def range_projection(n, k):
    """pi(k) pi*(k): the projection killing e_0..e_{k-1}; identity beyond the window."""
    diag = np.ones(n, dtype=complex)
    diag[:k] = 0
    return TruncatedOperator(np.diag(diag), n, down=0, up=0, fixes_tail=True)


def adjoint(a):
    kind = {ANALYTIC: COANALYTIC, COANALYTIC: ANALYTIC}.get(a.kind)
    return replace(a, matrix=a.matrix.T.conj(), down=a.up, up=a.down, kind=kind)


def scale(a, c):
    return replace(
        a, matrix=a.matrix * c, defect_bound=a.defect_bound * abs(c),
        norm_bound=a.norm_bound * abs(c), kind=None, symbol=None, inner=False,
        fixes_tail=a.fixes_tail and c == 1,
    )


def compose(a, b):
    """Matrix product with safe-block bookkeeping (see module docstring)."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot compose sizes {a.n} and {b.n}")
    structured = a.symbol is not None and b.symbol is not None
    if structured and a.kind == b.kind and a.kind in (ANALYTIC, COANALYTIC):
        return _compose_same_side(a, b)
    if structured and a.kind == COANALYTIC and b.kind == ANALYTIC:
        return _compose_junction(a, b)
    return _compose_dense(a, b)


def _defect(a, b):
    return a.defect_bound * b.norm_bound + b.defect_bound * a.norm_bound


def _compose_same_side(a, b):
    if a.symbol_exact and b.symbol_exact:
        symbol = np.convolve(a.symbol, b.symbol)
    else:
        length = min(len(s) for s, exact in ((a.symbol, a.symbol_exact), (b.symbol, b.symbol_exact)) if not exact)
        symbol = symbols.truncated_convolution(a.symbol, b.symbol, length)
    symbol.setflags(write=False)
    # both factors triangular: the product compression is the Toeplitz matrix of the product symbol
    matrix = _lower_toeplitz(symbol, a.n)
    if a.kind == COANALYTIC:
        matrix = matrix.conj().T
    return TruncatedOperator(
        matrix, min(a.safe_dim, b.safe_dim), _defect(a, b),
        down=_add(a.down, b.down), up=_add(a.up, b.up),
        norm_bound=a.norm_bound * b.norm_bound, kind=a.kind, symbol=symbol,
        symbol_exact=a.symbol_exact and b.symbol_exact, inner=a.inner and b.inner,
        certified=a.certified and b.certified,
    )


def _smooth_taper(length):
    # 1 on the first half, C-infinity decay to 0 at the end
    x = np.arange(length) / length
    s = np.clip(2 * x - 1, 0, 1)

    def bump(u):
        safe = np.where(u > 0, u, 1.0)
        return np.where(u > 0, np.exp(-1.0 / safe), 0.0)

    return bump(1 - s) / (bump(1 - s) + bump(s))


def _fft_correlation(f, g, n):
    """h[d + n - 1] = sum_m conj(f_m) g_{m+d} for |d| < n (finite sequences)."""
    size = 1 << int(math.ceil(math.log2(len(f) + len(g))))
    spec = np.fft.fft(np.conj(f[::-1]), size) * np.fft.fft(g, size)
    full = np.fft.ifft(spec)
    base = len(f) - 1
    out = np.zeros(2 * n - 1, dtype=complex)
    for i, d in enumerate(range(-(n - 1), n)):
        idx = base + d
        if 0 <= idx < len(f) + len(g) - 1:
            out[i] = full[idx]
    return out


def _sparse_correlation(f, g, n, f_is_short):
    """Exact correlation when one sequence has finite support."""
    out = np.zeros(2 * n - 1, dtype=complex)
    d = np.arange(-(n - 1), n)
    if f_is_short:
        for m in np.nonzero(f)[0]:
            idx = m + d
            ok = (idx >= 0) & (idx < len(g))
            out[ok] += np.conj(f[m]) * g[idx[ok]]
    else:
        for q in np.nonzero(g)[0]:
            idx = q - d
            ok = (idx >= 0) & (idx < len(f))
            out[ok] += np.conj(f[idx[ok]]) * g[q]
    return out


def _max_column_norm_of_toeplitz(h, n):
    # column j holds h[d] for d = -j .. n-1-j
    power = np.abs(h) ** 2
    cum = np.concatenate([[0.0], np.cumsum(power)])
    j = np.arange(n)
    lo = (n - 1) - j
    hi = lo + n
    return float(np.sqrt(np.max(cum[hi] - cum[lo])))


def _compose_junction(a, b):
    n = a.n
    f, g = a.symbol, b.symbol
    estimate = 0.0
    if a.symbol_exact and (not b.symbol_exact or len(f) <= len(g)):
        h = _sparse_correlation(f, g, n, f_is_short=True)
    elif b.symbol_exact:
        h = _sparse_correlation(f, g, n, f_is_short=False)
    else:
        length = min(len(f), len(g))
        h = _fft_correlation(f[:length] * _smooth_taper(length), g[:length], n)
        half = length // 2
        h_half = _fft_correlation(f[:half] * _smooth_taper(half), g[:half], n)
        estimate = _RICHARDSON * _max_column_norm_of_toeplitz(h - h_half, n)
    matrix = _toeplitz(h[n - 1:], h[n - 1::-1])
    return TruncatedOperator(
        matrix, min(a.safe_dim, b.safe_dim), _defect(a, b) + estimate,
        down=_add(a.down, b.down), up=_add(a.up, b.up),
        norm_bound=a.norm_bound * b.norm_bound,
        certified=a.certified and b.certified,
    )


def _matmul(x, y):
    # shift-built words are permutation-like; sparse products keep them cheap
    n = x.shape[0]
    if n >= 256 and np.count_nonzero(x) <= 4 * n and np.count_nonzero(y) <= 4 * n:
        return (sparse.csr_matrix(x) @ sparse.csr_matrix(y)).toarray()
    return x @ y


def _compose_dense(a, b):
    safe = min(a.safe_dim, b.safe_dim)
    defect = _defect(a, b)
    certified = a.certified and b.certified
    reaches = [r for r in (b.down, a.up) if r is not None]
    if reaches:
        safe = max(0, safe - max(min(reaches), 0))
    else:
        # mass can leave the window and come back: only the trivial bound
        certified = False
        defect += a.norm_bound * b.norm_bound
    return TruncatedOperator(
        _matmul(a.matrix, b.matrix), safe, defect, down=_add(a.down, b.down),
        up=_add(a.up, b.up), norm_bound=a.norm_bound * b.norm_bound,
        fixes_tail=a.fixes_tail and b.fixes_tail, certified=certified,
    )


def compose_all(*ops):
    out = ops[0]
    for op in ops[1:]:
        out = compose(out, op)
    return out


def apply(a, x):
    """Apply an operator to a vector, tracking the mass beyond the window."""
    if a.n != x.n:
        raise DimensionMismatch(f"operator size {a.n} vs vector size {x.n}")
    head = a.matrix @ x.coeffs
    defect = a.norm_bound * x.defect + a.defect_bound * x.norm()
    if a.fixes_tail:
        return HardyVector(head, x.tail, defect)
    if a.kind == ANALYTIC and a.inner:
        # lower triangular: the head is exact; the isometry fixes the total norm
        tail = math.sqrt(max(0.0, x.norm() ** 2 - float(np.linalg.norm(head)) ** 2))
        return HardyVector(head, tail, defect)
    if x.tail > 0:
        raise ValueError("mass beyond the window would fold back into the head")
    if a.kind == COANALYTIC or (a.down is not None and a.down <= 0):
        return HardyVector(head, 0.0, defect)
    raise ValueError("cannot track the tail of this operator's output")


def max_column_norm(matrix):
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(matrix, axis=0)))


def isometry_defect(a):
    """max over safe columns of ||(A*A - I) e_j||."""
    gram = compose(adjoint(a), a)
    s = gram.safe_dim
    if s == 0:
        raise SafeSubspaceEmpty("A*A has an empty safe block")
    return max_column_norm(gram.block() - np.eye(s))


def commutator_gap(a, b):
    ab, ba = compose(a, b), compose(b, a)
    s = min(ab.safe_dim, ba.safe_dim)
    if s == 0:
        raise SafeSubspaceEmpty("commutator has an empty safe block")
    return max_column_norm(ab.block(s) - ba.block(s))


def op_norm(a, tol=1e-10, max_iter=10000):
    """Largest singular value by power iteration on A*A from (1,...,1)/sqrt(N)."""
    return matrix_norm(a.matrix, tol, max_iter)


def matrix_norm(m, tol=1e-10, max_iter=10000):
    """Stops when ||M*M x - lam x|| <= tol * lam; clustered top singular values can exhaust the cap."""
    n = m.shape[1]
    if n == 0:
        return 0.0
    x = np.ones(n, dtype=complex) / math.sqrt(n)
    lam, residual = 0.0, float("inf")
    for _ in range(max_iter):
        y = m.conj().T @ (m @ x)
        lam = float(np.vdot(x, y).real)
        residual = float(np.linalg.norm(y - lam * x))
        if residual <= tol * max(lam, 1e-300) or lam == 0.0:
            return math.sqrt(max(lam, 0.0))
        x = y / np.linalg.norm(y)
    raise NoConvergence("power iteration did not converge", math.sqrt(max(lam, 0.0)), residual)


@dataclass(frozen=True)
class WoldDecomposition:
    wandering_basis: list
    reconstruction_defect: float

    @property
    def wandering_dim(self):
        return len(self.wandering_basis)


def wold_decompose(v, null_tol=1e-10):
    """Wandering subspace ker V* on the safe block and how well V^n H_0 rebuild it."""
    if isometry_defect(v) > 1e-6:
        raise NotAnIsometry("Wold decomposition needs an isometry")
    s = v.safe_dim
    block = v.block(s)
    _, sing, vh = np.linalg.svd(block.conj().T)
    null = vh[sing <= null_tol].conj()
    basis = []
    for row in null:
        coeffs = np.zeros(v.n, dtype=complex)
        coeffs[:s] = row
        basis.append(HardyVector(coeffs))
    # sum_n V^n P0 V*^n = Z Z^H with Z = [W, V W, V^2 W, ...]
    step = sparse.csr_matrix(block) if np.count_nonzero(block) <= 4 * s else block
    current = null.T.copy()
    columns = []
    for _ in range(s + 1):
        if current.size == 0 or not np.any(np.abs(current) > 1e-15):
            break
        columns.append(current)
        current = step @ current
    z = np.hstack(columns) if columns else np.zeros((s, 0), dtype=complex)
    total = z @ z.conj().T
    return WoldDecomposition(basis, max_column_norm(np.eye(s) - total))


@dataclass(frozen=True)
class SymbolRecovery:
    series: symbols.FourierSeries
    residual: float


def symbol_of_commuting_isometry(t, eps):
    """Recover the inner symbol of an isometry commuting with the shift as T e_0."""
    if isometry_defect(t) > eps:
        raise NotAnIsometry("operator is not an isometry on its safe block")
    if commutator_gap(t, shift_op(t.n, 1)) > eps:
        raise NotCommuting("operator does not commute with the shift")
    column = t.matrix[:, 0]
    s = t.safe_dim
    residual = max_column_norm(t.block(s) - _lower_toeplitz(column, s))
    if residual > 10 * eps:
        raise SymbolMismatch(f"operator differs from the Toeplitz matrix of T e_0 by {residual:.3e}")
    return SymbolRecovery(symbols.FourierSeries.from_inner_coeffs(column), residual)


@dataclass(frozen=True)
class MultiHardy:
    """Direct sum of J copies of H^2, coordinate (j, n) stored at J*n + (j - 1)."""

    J: int
    N: int

    @property
    def dim(self):
        return self.J * self.N

    def index(self, j, n):
        if not (1 <= j <= self.J and 0 <= n < self.N):
            raise IndexError(f"component ({j}, {n}) outside {self.J} x {self.N}")
        return self.J * n + (j - 1)

    def basis_vector(self, j, n):
        return basis_vector(self.dim, self.index(j, n))

    def component_shift(self):
        """pi(1) acting as the shift inside every component."""
        return shift_op(self.dim, self.J)


@dataclass(frozen=True)
class InterleavedExtension:
    T: TruncatedOperator
    pi1: TruncatedOperator
    space: MultiHardy


def interleaved_extension(n):
    """T e_n^(1) = e_n^(2), T e_n^(2) = e_{n+1}^(1): the plain shift on interleaved coordinates."""
    if n < 2:
        raise ValueError("need N >= 2")
    space = MultiHardy(2, n)
    t = shift_op(space.dim, 1)
    return InterleavedExtension(t, compose(t, t), space)
