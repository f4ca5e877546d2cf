"""Precision plumbing, Chebyshev grids and quadrature rules.

Every number in the package lives in an mpmath context whose precision is
fixed by a :class:`PrecisionConfig`.  Contexts are cached per bit count, so
two configs with the same ``mantissa_bits`` share arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import DomainError, NumericalError


@lru_cache(maxsize=None)
def mp_context(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def to_mp(ctx, x):
    """Re-home a number (int, str, Fraction, float or foreign mpf) in ``ctx``."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.convert(x)


@dataclass(frozen=True)
class PrecisionConfig:
    mantissa_bits: int = 256
    quad_order: int = 256
    fp_tol: object = None
    max_iter: int = 400

    def __post_init__(self):
        if int(self.mantissa_bits) != self.mantissa_bits or self.mantissa_bits < 64:
            raise ValueError(f"mantissa_bits must be an integer >= 64, got {self.mantissa_bits}")
        if int(self.quad_order) != self.quad_order or self.quad_order < 16:
            raise ValueError(f"quad_order must be an integer >= 16, got {self.quad_order}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        ctx = mp_context(self.mantissa_bits)
        tol = ctx.ldexp(1, -(self.mantissa_bits // 4)) if self.fp_tol is None else to_mp(ctx, self.fp_tol)
        if not tol > 0:
            raise ValueError("fp_tol must be positive")
        object.__setattr__(self, "fp_tol", tol)

    @property
    def ctx(self):
        return mp_context(self.mantissa_bits)

    @property
    def resid_tol(self):
        return self.ctx.ldexp(1, -(self.mantissa_bits // 2))

    @property
    def equil_tol(self):
        return 1000 * self.fp_tol

    def with_bits(self, bits: int) -> "PrecisionConfig":
        # keep a user-chosen tolerance, otherwise follow the new precision
        default = self.fp_tol == mp_context(self.mantissa_bits).ldexp(1, -(self.mantissa_bits // 4))
        return PrecisionConfig(bits, self.quad_order, None if default else self.fp_tol, self.max_iter)

    def with_order(self, order: int) -> "PrecisionConfig":
        return PrecisionConfig(self.mantissa_bits, order, self.fp_tol, self.max_iter)

    def key(self):
        return (self.mantissa_bits, self.quad_order)


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        if isinstance(x, float) and not math.isfinite(x):
            raise DomainError(f"non-finite endpoint {x}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    # mpf from some context: exact binary value
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(man) * Fraction(2) ** exp


@dataclass(frozen=True)
class Interval:
    """Closed real interval [a, b] with exact rational endpoints."""

    a: Fraction
    b: Fraction

    def __init__(self, a, b):
        fa, fb = _exact(a), _exact(b)
        if not fa < fb:
            raise DomainError(f"degenerate interval [{a}, {b}]")
        object.__setattr__(self, "a", fa)
        object.__setattr__(self, "b", fb)

    def ends(self, ctx):
        return to_mp(ctx, self.a), to_mp(ctx, self.b)

    def center_radius(self, ctx):
        a, b = self.ends(ctx)
        return (a + b) / 2, (b - a) / 2

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    def contains(self, z, ctx) -> bool:
        """True when z lies on the closed interval (as a real point)."""
        z = ctx.convert(z)
        if isinstance(z, ctx.mpc) and z.imag != 0:
            return False
        x = ctx.re(z)
        a, b = self.ends(ctx)
        return a <= x <= b

    def disjoint(self, other: "Interval") -> bool:
        return self.b < other.a or other.b < self.a

    def mirror(self) -> "Interval":
        return Interval(-self.b, -self.a)

    def __repr__(self):
        return f"Interval({self.a}, {self.b})"

    def __str__(self):
        return f"[{self.a}, {self.b}]"


# ---------------------------------------------------------------------------
# Chebyshev grids


@dataclass(frozen=True)
class ChebGrid:
    interval: Interval
    nodes: tuple
    weights: tuple
    s: tuple = field(repr=False)  # nodes in the reference variable on [-1, 1]
    bits: int = field(repr=False, default=256)

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def ctx(self):
        return mp_context(self.bits)


@lru_cache(maxsize=None)
def _cos_table(order: int, bits: int):
    # cos(m*pi/(2N)) for m = 0..4N-1
    ctx = mp_context(bits)
    return tuple(ctx.cospi(ctx.mpf(m) / (2 * order)) for m in range(4 * order))


@lru_cache(maxsize=None)
def cheb_reference(order: int, bits: int):
    """Increasing Chebyshev–Gauss nodes on [-1, 1]: s_j = -cos((2j+1)pi/2N)."""
    tab = _cos_table(order, bits)
    return tuple(-tab[2 * j + 1] for j in range(order))


@lru_cache(maxsize=None)
def cheb_transform_matrix(order: int, bits: int):
    """Rows k of T_k(s_j) for k, j < order (exact angle bookkeeping, no recurrence)."""
    tab = _cos_table(order, bits)
    four = 4 * order
    rows = []
    for k in range(order):
        # T_k(s_j) = cos(k*theta_j), theta_j = pi - (2j+1)pi/(2N)
        sign = -1 if k % 2 else 1
        row = []
        for j in range(order):
            v = tab[(k * (2 * j + 1)) % four]
            row.append(v if sign > 0 else -v)
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=256)
def _cheb_grid(a: Fraction, b: Fraction, order: int, bits: int) -> ChebGrid:
    ctx = mp_context(bits)
    iv = Interval(a, b)
    m, r = iv.center_radius(ctx)
    s = cheb_reference(order, bits)
    w = ctx.pi / order
    return ChebGrid(iv, tuple(m + r * t for t in s), (w,) * order, s, bits)


def cheb_grid(interval: Interval, cfg: PrecisionConfig) -> ChebGrid:
    return _cheb_grid(interval.a, interval.b, cfg.quad_order, cfg.mantissa_bits)


def cheb_coeffs(values: Sequence, bits: int) -> list:
    """Chebyshev coefficients c_k of the interpolant through values at the grid nodes."""
    n = len(values)
    ctx = mp_context(bits)
    rows = cheb_transform_matrix(n, bits)
    vals = list(values)
    c = [ctx.fdot(row, vals) * 2 / n for row in rows]
    c[0] /= 2
    return c


def clenshaw(coeffs: Sequence, s, ctx):
    """Sum c_k T_k(s); s may be real or complex."""
    b1 = b2 = 0
    two_s = 2 * s
    for c in reversed(coeffs[1:]):
        b1, b2 = two_s * b1 - b2 + c, b1
    return s * b1 - b2 + coeffs[0] if coeffs else ctx.zero


def _finite(ctx, v) -> bool:
    return ctx.isfinite(v) if not isinstance(v, ctx.mpc) else (ctx.isfinite(v.real) and ctx.isfinite(v.imag))


def quad_eta(f: Callable, grid: ChebGrid):
    """Integral of f against dη = dx / sqrt((b-x)(x-a)) on the grid's interval."""
    ctx = grid.ctx
    vals = []
    for x in grid.nodes:
        v = ctx.convert(f(x))
        if not _finite(ctx, v):
            raise NumericalError(f"non-finite integrand value at node {ctx.nstr(x, 20)}")
        vals.append(v)
    return ctx.fsum(vals) * grid.weights[0]


# ---------------------------------------------------------------------------
# Gauss–Jacobi rules


@dataclass(frozen=True)
class QuadRule:
    """Nodes and weights with ∫ f dμ ≈ Σ w_i f(x_i)."""

    nodes: tuple
    weights: tuple
    bits: int

    def apply(self, f: Callable):
        ctx = mp_context(self.bits)
        return ctx.fdot(self.weights, [f(x) for x in self.nodes])

    def scaled(self, factors: Sequence) -> "QuadRule":
        return QuadRule(self.nodes, tuple(w * g for w, g in zip(self.weights, factors)), self.bits)

    def __len__(self):
        return len(self.nodes)


def _jacobi_recurrence(ctx, alpha, beta, n):
    """Orthonormal three-term coefficients (diag a_k, offdiag b_k, k=1..n-1) and mass."""
    ab = alpha + beta
    a = []
    for k in range(n):
        if k == 0:
            a.append((beta - alpha) / (ab + 2))
        else:
            d = (2 * k + ab) * (2 * k + ab + 2)
            a.append((beta * beta - alpha * alpha) / d)
    b = [ctx.zero]
    for k in range(1, n):
        if k == 1:
            num = 4 * (1 + alpha) * (1 + beta)
            den = (2 + ab) ** 2 * (3 + ab)
        else:
            num = 4 * k * (k + alpha) * (k + beta) * (k + ab)
            den = (2 * k + ab) ** 2 * (2 * k + ab + 1) * (2 * k + ab - 1)
        b.append(ctx.sqrt(num / den))
    mass = ctx.power(2, ab + 1) * ctx.gamma(alpha + 1) * ctx.gamma(beta + 1) / ctx.gamma(ab + 2)
    return a, b, mass


@lru_cache(maxsize=64)
def _gauss_jacobi_ref(alpha: Fraction, beta: Fraction, n: int, bits: int):
    ctx = mp_context(bits + 16)
    al, be = to_mp(ctx, alpha), to_mp(ctx, beta)
    if alpha == beta == Fraction(-1, 2):
        s = list(cheb_reference(n, bits + 16))
        w = [ctx.pi / n] * n
    else:
        a, b, mass = _jacobi_recurrence(ctx, al, be, n + 1)
        jm = np.diag([float(v) for v in a[:n]]) + np.diag([float(v) for v in b[1:n]], 1) + np.diag(
            [float(v) for v in b[1:n]], -1
        )
        guesses = np.sort(np.linalg.eigvalsh(jm))
        # the recurrence runs in scaled integers: about 5x faster than mpf objects
        P = bits + 48
        fix = lambda v: int(ctx.ldexp(v, P))
        A = [fix(v) for v in a[: n + 1]]
        B = [fix(v) for v in b[: n + 1]]
        IB = [0] + [fix(1 / v) for v in b[1 : n + 1]]
        p0 = fix(1 / ctx.sqrt(mass))
        s, w = [], []
        for g in guesses:
            X = fix(ctx.mpf(float(g)))
            for it in range(10):
                pm, p, dm, dp = 0, p0, 0, 0
                for k in range(n):
                    xa = X - A[k]
                    pn = ((xa * p - B[k] * pm) >> P) * IB[k + 1] >> P
                    dn = ((xa * dp - B[k] * dm >> P) + p) * IB[k + 1] >> P
                    pm, p, dm, dp = p, pn, dp, dn
                step = (p << P) // dp
                X -= step
                if abs(step) < 1 << 40:
                    break
            if abs(step) > 1 << 52:
                raise NumericalError(f"Gauss–Jacobi node refinement stalled near {g}")
            pm, p, acc = 0, p0, p0 * p0
            for k in range(n - 1):
                pn = (((X - A[k]) * p - B[k] * pm) >> P) * IB[k + 1] >> P
                pm, p = p, pn
                acc += p * p
            s.append(ctx.ldexp(X, -P))
            w.append(ctx.ldexp(1, 2 * P) / acc)
    out = mp_context(bits)
    return tuple(+out.convert(x) for x in s), tuple(+out.convert(v) for v in w)


def gauss_jacobi(interval: Interval, alpha, beta, cfg: PrecisionConfig, order: int | None = None) -> QuadRule:
    """Rule for ∫ f(x) (b-x)^alpha (x-a)^beta dx over the interval."""
    alpha, beta = _exact(alpha), _exact(beta)
    if alpha <= -1 or beta <= -1:
        raise DomainError("Jacobi exponents must exceed -1")
    n = order or cfg.quad_order
    return _gauss_jacobi(interval.a, interval.b, alpha, beta, n, cfg.mantissa_bits)


@lru_cache(maxsize=128)
def _gauss_jacobi(a, b, alpha, beta, n, bits):
    ctx = mp_context(bits)
    s, w = _gauss_jacobi_ref(alpha, beta, n, bits)
    m, r = Interval(a, b).center_radius(ctx)
    scale = ctx.power(r, to_mp(ctx, alpha + beta + 1))
    return QuadRule(tuple(m + r * t for t in s), tuple(scale * v for v in w), bits)


def quad_lebesgue(f: Callable, interval: Interval, cfg: PrecisionConfig):
    """Gauss–Legendre value of ∫_a^b f(x) dx."""
    rule = gauss_jacobi(interval, 0, 0, cfg)
    ctx = cfg.ctx
    vals = []
    for x in rule.nodes:
        v = ctx.convert(f(x))
        if not _finite(ctx, v):
            raise NumericalError(f"non-finite integrand value at node {ctx.nstr(x, 20)}")
        vals.append(v)
    return ctx.fdot(rule.weights, vals)


# ---------------------------------------------------------------------------
# small dense linear algebra (mpmath's matrix class is slow for our sizes)


def lu_solve(ctx, A: Sequence[Sequence], rhs: Sequence, tiny=None):
    """Solve A x = rhs by Gaussian elimination with partial pivoting.

    Raises NumericalError when a pivot falls below ``tiny`` times the largest
    entry, which callers treat as a request for more precision.
    """
    n = len(A)
    M = [list(row) + [rhs[i]] for i, row in enumerate(A)]
    scale = max(abs(v) for row in A for v in row)
    if tiny is None:
        tiny = ctx.ldexp(1, -ctx.prec + 4)
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(M[i][col]))
        if abs(M[piv][col]) <= tiny * scale:
            raise NumericalError(f"singular system at column {col} (precision exhausted)")
        M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        for i in range(col + 1, n):
            f = M[i][col] * inv
            if f:
                row = M[i]
                for j in range(col + 1, n + 1):
                    row[j] -= f * prow[j]
    x = [ctx.zero] * n
    for i in range(n - 1, -1, -1):
        row = M[i]
        acc = row[n] - ctx.fdot(row[i + 1 : n], x[i + 1 :]) if i + 1 < n else row[n]
        x[i] = acc / row[i]
    return x


def matvec(ctx, M: Sequence[Sequence], v: Sequence) -> list:
    v = list(v)
    return [ctx.fdot(row, v) for row in M]


def sup_abs(ctx, xs) -> object:
    return max((abs(x) for x in xs), default=ctx.zero)


# ---------------------------------------------------------------------------
# decimal output


def digits_for(bits: int) -> int:
    return int(bits * math.log10(2))


def render(v, digits: int):
    """Decimal strings for numbers, recursively; everything else passes through."""
    if isinstance(v, dict):
        return {str(k): render(x, digits) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [render(x, digits) for x in v]
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v)
    ctx = mp_context(max(64, int(digits * 3.33) + 8))
    x = ctx.convert(v)
    if isinstance(x, ctx.mpc):
        return {"re": ctx.nstr(x.real, digits, min_fixed=1, max_fixed=0),
                "im": ctx.nstr(x.imag, digits, min_fixed=1, max_fixed=0)}
    return ctx.nstr(x, digits, min_fixed=1, max_fixed=0)
