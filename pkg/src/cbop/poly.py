"""Polynomials stored by Chebyshev coefficients on a reference interval, or as root products."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .numkit import Interval, clenshaw, mp_context


@dataclass(frozen=True)
class Poly:
    """p(x) = Σ c_k T_k(s), s = (x - m)/r on the given interval."""

    interval: Interval
    coeffs: tuple
    bits: int

    @property
    def ctx(self):
        return mp_context(self.bits)

    @property
    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0:
            d -= 1
        return d

    def _s(self, x):
        m, r = self.interval.center_radius(self.ctx)
        return (x - m) / r

    def __call__(self, x):
        ctx = self.ctx
        return clenshaw(self.coeffs, self._s(ctx.convert(x)), ctx)

    def derivative(self) -> "Poly":
        ctx = self.ctx
        n = len(self.coeffs) - 1
        if n == 0:
            return Poly(self.interval, (ctx.zero,), self.bits)
        d = [ctx.zero] * (n + 1)
        for k in range(n, 0, -1):
            # standard recurrence for the derivative series
            d[k - 1] = (d[k + 1] if k + 1 <= n else 0) + 2 * k * self.coeffs[k]
        d[0] /= 2
        _, r = self.interval.center_radius(ctx)
        return Poly(self.interval, tuple(v / r for v in d[:n]), self.bits)

    def leading(self):
        """Coefficient of x^deg in the monomial basis."""
        ctx = self.ctx
        n = self.degree
        _, r = self.interval.center_radius(ctx)
        scale = ctx.one if n == 0 else ctx.ldexp(1, n - 1)
        return self.coeffs[n] * scale / r**n

    def scale(self, c) -> "Poly":
        return Poly(self.interval, tuple(c * v for v in self.coeffs), self.bits)

    def monic(self) -> "Poly":
        return self.scale(1 / self.leading())

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.ctx.zero
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        b = list(other.coeffs) + [z] * (n - len(other.coeffs))
        return Poly(self.interval, tuple(x + y for x, y in zip(a, b)), self.bits)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scale(-1)

    def mul_linear(self, t) -> "Poly":
        """(x - t) p(x)."""
        ctx = self.ctx
        m, r = self.interval.center_radius(ctx)
        st = (t - m) / r
        c = list(self.coeffs) + [ctx.zero]
        out = [ctx.zero] * len(c)
        # s T_k = (T_{k+1} + T_{|k-1|}) / 2
        for k, v in enumerate(c[:-1]):
            if k == 0:
                out[1] += v
            else:
                out[k + 1] += v / 2
                out[k - 1] += v / 2
        out = [r * (o - st * v) for o, v in zip(out, c)]
        return Poly(self.interval, tuple(out), self.bits)

    def zeros(self, real_only=True) -> list:
        """Zeros from a double-precision colleague matrix, polished by Newton at full precision.

        If the double-precision guesses are too poor for Newton (badly scaled
        coefficients), the colleague matrix is solved again at working precision.
        """
        ctx = self.ctx
        n = self.degree
        if n == 0:
            return []
        lead = self.coeffs[n]
        guesses = _colleague_roots([float(v / lead) for v in self.coeffs[: n + 1]])
        try:
            out = self._polish(guesses, real_only)
        except NumericalError:
            out = self._polish(self._colleague_mp(), real_only)
        out.sort(key=lambda v: ctx.re(v))
        return out

    def _polish(self, guesses, real_only):
        ctx = self.ctx
        d = self.derivative()
        m, r = self.interval.center_radius(ctx)
        tol = ctx.ldexp(1, -ctx.prec + 8)
        loose = ctx.ldexp(1, -ctx.prec // 2)
        out = []
        for g in guesses:
            if real_only:
                x = m + r * ctx.mpf(float(ctx.re(g)))
            else:
                x = m + r * ctx.mpc(complex(g))
            prev = None
            for _ in range(80):
                step = self(x) / d(x)
                x -= step
                size = abs(step)
                if size <= tol * (abs(x) + 1):
                    break
                # rounding floor reached: steps stop shrinking
                if prev is not None and size < loose * (abs(x) + 1) and size > prev / 2:
                    break
                prev = size
            else:
                raise NumericalError("Newton polish of a polynomial zero did not settle")
            out.append(x)
        scale = ctx.ldexp(1, -ctx.prec // 2) * r
        srt = sorted(out, key=lambda v: ctx.re(v))
        for a, b in zip(srt, srt[1:]):
            if abs(a - b) < scale:
                raise NumericalError("Newton polish merged two zeros")
        return out

    def _colleague_mp(self):
        ctx = self.ctx
        n = self.degree
        c = [v / self.coeffs[n] for v in self.coeffs[: n + 1]]
        A = ctx.matrix(n, n)
        if n == 1:
            return [-c[0]]
        A[0, 1] = 1
        for i in range(1, n - 1):
            A[i, i - 1] = A[i, i + 1] = ctx.mpf(1) / 2
        A[n - 1, n - 2] = ctx.mpf(1) / 2
        for j in range(n):
            A[n - 1, j] -= c[j] / 2
        return list(ctx.eig(A, left=False, right=False))

    def to_monomial(self) -> list:
        """Monomial coefficients in x, lowest degree first (for I/O only)."""
        ctx = self.ctx
        m, r = self.interval.center_radius(ctx)
        # T_k in s via recurrence, then substitute s = (x - m)/r
        n = len(self.coeffs)
        tk_prev, tk = [ctx.one], [ctx.zero, ctx.one]
        acc_s = [ctx.zero] * n
        acc_s[0] += self.coeffs[0]
        if n > 1:
            acc_s[1] += self.coeffs[1]
        for k in range(2, n):
            nxt = [ctx.zero] * (k + 1)
            for i, v in enumerate(tk):
                nxt[i + 1] += 2 * v
            for i, v in enumerate(tk_prev):
                nxt[i] -= v
            tk_prev, tk = tk, nxt
            for i, v in enumerate(tk):
                acc_s[i] += self.coeffs[k] * v
        out = [ctx.zero] * n
        # s^i = ((x - m)/r)^i
        for i, v in enumerate(acc_s):
            if not v:
                continue
            binom = ctx.one
            for j in range(i + 1):
                # coefficient of x^j in (x - m)^i
                out[j] += v * binom * (-m) ** (i - j) / r**i
                binom = binom * (i - j) / (j + 1)
        return out


def _colleague_roots(c: list) -> np.ndarray:
    """Roots of Σ c_k T_k with c_n = 1 (colleague matrix eigenvalues)."""
    n = len(c) - 1
    if n == 1:
        return np.array([-c[0]], dtype=complex)
    A = np.zeros((n, n))
    A[0, 1] = 1.0
    for i in range(1, n - 1):
        A[i, i - 1] = A[i, i + 1] = 0.5
    A[n - 1, n - 2] = 0.5
    A[n - 1, :] -= np.array(c[:n]) / 2
    return np.sort_complex(np.linalg.eigvals(A))


@dataclass(frozen=True)
class RootPoly:
    """lead · Π (x - roots[i]); used for interpolation denominators w_2n."""

    roots: tuple
    lead: object
    bits: int

    @property
    def degree(self) -> int:
        return len(self.roots)

    def __call__(self, x):
        ctx = mp_context(self.bits)
        v = ctx.convert(self.lead)
        for t in self.roots:
            v *= x - t
        return v

    def log_abs(self, x):
        ctx = mp_context(self.bits)
        return ctx.ln(abs(ctx.convert(self.lead))) + ctx.fsum(ctx.ln(abs(x - t)) for t in self.roots)

    def scale(self, k) -> "RootPoly":
        return RootPoly(self.roots, self.lead * k, self.bits)

    def to_cheb(self, interval: Interval) -> Poly:
        ctx = mp_context(self.bits)
        p = Poly(interval, (ctx.convert(self.lead),), self.bits)
        for t in self.roots:
            p = p.mul_linear(t)
        return p
