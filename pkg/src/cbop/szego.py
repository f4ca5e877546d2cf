"""Exterior map Ψ, Szegő functions of an interval, Blaschke products.

A Szegő function G(h, ·) of the data h = (b-x)^p (x-a)^q e^{g(x)} is stored
by p, q and the Chebyshev coefficients c_k of the smooth part g.  With
ζ = Ψ(u) the Cauchy integral of the smooth part is the power series
Σ c_k ζ^{-k}, and the endpoint factors have closed-form outer functions:

    ln G = -½ [ p ln E_b(ζ) + q ln E_a(ζ) + Σ c_k ζ^{-k} ],
    E_b = r (1 - 1/ζ)² / 2,   E_a = r (1 + 1/ζ)² / 2.

This stays spectrally accurate all the way to the slit, where a direct dη
quadrature of the Cauchy integral does not.  The direct route is kept in
:func:`szego_direct` as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import DomainError, SzegoConditionError
from .numkit import Interval, PrecisionConfig, cheb_coeffs, cheb_grid, mp_context, quad_eta, to_mp
from .poly import RootPoly


def _is_real(ctx, u) -> bool:
    return not isinstance(u, ctx.mpc) or u.imag == 0


def psi_norm(ctx, w):
    """Inverse Joukowski on the reference interval: ζ with |ζ| > 1, ζ ~ 2w."""
    if _is_real(ctx, w):
        w = ctx.re(w)
        if -1 <= w <= 1:
            raise DomainError("point on the interval")
        return w + ctx.sign(w) * ctx.sqrt(w * w - 1)
    return w + ctx.sqrt(w - 1) * ctx.sqrt(w + 1)


def psi_map(interval: Interval, u, cfg: PrecisionConfig | None = None):
    """Exterior conformal map of C minus the interval onto |ζ| > 1."""
    ctx = (cfg or PrecisionConfig()).ctx
    u = ctx.convert(u)
    m, r = interval.center_radius(ctx)
    try:
        return psi_norm(ctx, (u - m) / r)
    except DomainError:
        raise DomainError(f"u={u} lies on {interval}") from None


def psi_boundary(interval: Interval, x, ctx):
    """Upper-side boundary value e^{iθ} of Ψ at an interior point."""
    m, r = interval.center_radius(ctx)
    s = (x - m) / r
    if not -1 < s < 1:
        raise DomainError(f"x={x} is not interior to {interval}")
    return ctx.mpc(s, ctx.sqrt((1 - s) * (1 + s)))


def _series_inv(ctx, coeffs, tails, t):
    """Σ c_k t^k with |t| < 1, stopping once the remaining terms are negligible."""
    acc = coeffs[0]
    tk = ctx.one
    at = abs(t)
    ak = ctx.one
    eps = ctx.ldexp(1, -ctx.prec - 4)
    for k in range(1, len(coeffs)):
        tk *= t
        ak *= at
        if ak * tails[k] < eps:
            break
        acc += coeffs[k] * tk
    return acc


def _tails(ctx, coeffs):
    out = [ctx.zero] * (len(coeffs) + 1)
    for k in range(len(coeffs) - 1, -1, -1):
        out[k] = max(out[k + 1], abs(coeffs[k]))
    return tuple(out)


@dataclass(frozen=True)
class SzegoFn:
    interval: Interval
    p: Fraction  # exponent of (b - x) in h
    q: Fraction  # exponent of (x - a) in h
    coeffs: tuple  # Chebyshev coefficients of the smooth part of ln h
    log_data: tuple  # ln h at the grid nodes
    bits: int

    @property
    def ctx(self):
        return mp_context(self.bits)

    def _tails(self):
        t = self.__dict__.get("_tail_cache")
        if t is None:
            t = _tails(self.ctx, self.coeffs)
            object.__setattr__(self, "_tail_cache", t)
        return t

    def _log_from_zeta(self, zeta):
        ctx = self.ctx
        _, r = self.interval.center_radius(ctx)
        t = 1 / zeta
        acc = _series_inv(ctx, self.coeffs, self._tails(), t)
        lr = ctx.ln(r / 2)
        if self.p:
            acc += to_mp(ctx, self.p) * (lr + 2 * ctx.ln(1 - t))
        if self.q:
            acc += to_mp(ctx, self.q) * (lr + 2 * ctx.ln(1 + t))
        return -acc / 2

    def log(self, u):
        """ln G(u); real for real u off the interval."""
        ctx = self.ctx
        u = ctx.convert(u)
        m, r = self.interval.center_radius(ctx)
        try:
            zeta = psi_norm(ctx, (u - m) / r)
        except DomainError:
            raise DomainError(f"u={u} lies on {self.interval}") from None
        return self._log_from_zeta(zeta)

    def __call__(self, u):
        return self.ctx.exp(self.log(u))

    def boundary(self, x):
        """Upper-side limit of G at an interior point x."""
        return self.ctx.exp(self._log_from_zeta(psi_boundary(self.interval, x, self.ctx)))

    @property
    def value_at_inf(self):
        ctx = self.ctx
        _, r = self.interval.center_radius(ctx)
        return ctx.exp(-(to_mp(ctx, self.p + self.q) * ctx.ln(r / 2) + self.coeffs[0]) / 2)

    def __mul__(self, other: "SzegoFn") -> "SzegoFn":
        """G(h1) G(h2) = G(h1 h2)."""
        if other.interval != self.interval or len(other.coeffs) != len(self.coeffs):
            raise ValueError("Szegő functions live on different grids")
        return SzegoFn(
            self.interval,
            self.p + other.p,
            self.q + other.q,
            tuple(x + y for x, y in zip(self.coeffs, other.coeffs)),
            tuple(x + y for x, y in zip(self.log_data, other.log_data)),
            self.bits,
        )

    def power(self, k) -> "SzegoFn":
        """G(h^k) = G(h)^k."""
        ctx = self.ctx
        kk = to_mp(ctx, k)
        return SzegoFn(self.interval, self.p * k, self.q * k, tuple(kk * c for c in self.coeffs),
                       tuple(kk * v for v in self.log_data), self.bits)


def szego_from_values(interval: Interval, smooth_values: Sequence, cfg: PrecisionConfig, p=0, q=0) -> SzegoFn:
    """Szegő function from smooth log-data sampled at the Chebyshev grid of cfg."""
    ctx = cfg.ctx
    p, q = Fraction(p), Fraction(q)
    grid = cheb_grid(interval, cfg)
    a, b = interval.ends(ctx)
    vals = list(smooth_values)
    for x, v in zip(grid.nodes, vals):
        if not ctx.isfinite(v):
            raise SzegoConditionError(f"log-data not finite at x={ctx.nstr(x, 15)}")
    full = []
    for x, v in zip(grid.nodes, vals):
        full.append(v + (to_mp(ctx, p) * ctx.ln(b - x) if p else 0) + (to_mp(ctx, q) * ctx.ln(x - a) if q else 0))
    return SzegoFn(interval, p, q, tuple(cheb_coeffs(vals, cfg.mantissa_bits)), tuple(full), cfg.mantissa_bits)


def szego_from_h(interval: Interval, ln_h: Callable, cfg: PrecisionConfig, p=0, q=0) -> SzegoFn:
    """G(h, ·) for h = (b-x)^p (x-a)^q e^{g}; ln_h returns the full ln h(x)."""
    ctx = cfg.ctx
    grid = cheb_grid(interval, cfg)
    a, b = interval.ends(ctx)
    pp, qq = to_mp(ctx, Fraction(p)), to_mp(ctx, Fraction(q))
    smooth = []
    for x in grid.nodes:
        v = ctx.convert(ln_h(x))
        if p:
            v -= pp * ctx.ln(b - x)
        if q:
            v -= qq * ctx.ln(x - a)
        smooth.append(v)
    return szego_from_values(interval, smooth, cfg, p, q)


def szego_from_measure(m, cfg: PrecisionConfig) -> SzegoFn:
    """G(μ, ·) with h = sqrt((b-x)(x-a)) μ'(x)."""
    ctx = cfg.ctx
    grid = cheb_grid(m.interval, cfg)
    smooth = [m.log_smooth(x, ctx) for x in grid.nodes]
    half = Fraction(1, 2)
    return szego_from_values(m.interval, smooth, cfg, m.alpha + half, m.beta + half)


def szego_direct(interval: Interval, ln_h: Callable, u, cfg: PrecisionConfig):
    """G(h, u) from the Cauchy integral evaluated by dη quadrature (check route)."""
    ctx = cfg.ctx
    u = ctx.convert(u)
    if interval.contains(u, ctx):
        raise DomainError(f"u={u} lies on {interval}")
    m, r = interval.center_radius(ctx)
    w = (u - m) / r
    root = r * (ctx.sign(w) * ctx.sqrt(w * w - 1) if _is_real(ctx, w) else ctx.sqrt(w - 1) * ctx.sqrt(w + 1))
    grid = cheb_grid(interval, cfg)
    integral = quad_eta(lambda x: ln_h(x) / (x - u), grid)
    return ctx.exp(root * integral / (2 * ctx.pi))


# ---------------------------------------------------------------------------
# Blaschke products


@dataclass(frozen=True)
class BlaschkeProduct:
    interval: Interval
    zeros: tuple  # points off the interval; None stands for infinity

    def divergence(self, cfg: PrecisionConfig):
        """Σ (1 - 1/|Ψ(x_i)|), the quantity whose divergence is required of the zero sequence."""
        ctx = cfg.ctx
        return ctx.fsum(1 - (0 if z is None else 1 / abs(psi_map(self.interval, z, cfg))) for z in self.zeros)


def blaschke_eval(B: BlaschkeProduct, u, cfg: PrecisionConfig | None = None):
    cfg = cfg or PrecisionConfig()
    ctx = cfg.ctx
    zeta = psi_map(B.interval, u, cfg)
    v = ctx.one
    for x in B.zeros:
        if x is None:
            v /= zeta
        else:
            xi = psi_map(B.interval, x, cfg)
            v *= (zeta - xi) / (1 - ctx.conj(xi) * zeta)
    return v


# ---------------------------------------------------------------------------


def exterior_probes(interval: Interval, cfg: PrecisionConfig, count: int = 12, distance=None):
    """Points on the level curve of |Ψ| passing one interval length (or ``distance``) beyond b."""
    ctx = cfg.ctx
    m, r = interval.center_radius(ctx)
    d = to_mp(ctx, interval.length if distance is None else distance)
    w = 1 + d / r
    R = w + ctx.sqrt(w * w - 1)
    out = []
    for j in range(count):
        z = R * ctx.expjpi(ctx.mpf(2 * j + 1) / count)
        out.append(m + r * (z + 1 / z) / 2)
    return out


def outer_identity_check(w2n: RootPoly, ln_phi: Callable | None, interval: Interval, cfg: PrecisionConfig,
                         comparison=None, n: int | None = None, probes=None) -> dict:
    """Residuals of the two outer-function identities behind the strong asymptotics.

    (c)  Ψ^{2n} B_{2n} / w_{2n} = G(|w_{2n}|, u)²
    (a3) (C Φ / Ψ)^{2n} = G(φ, u)^{2n}, needs ``comparison`` (Φ, C) and ln φ.

    2n is the formal degree: w2n.degree finite zeros plus zeros at infinity.
    """
    ctx = cfg.ctx
    probes = probes or exterior_probes(interval, cfg)
    for t in w2n.roots:
        if interval.contains(t, ctx):
            raise DomainError(f"w_2n vanishes at {t} on {interval}")
    two_n = 2 * n if n is not None else w2n.degree + (w2n.degree % 2)
    zeros = tuple(w2n.roots) + (None,) * (two_n - w2n.degree)
    B = BlaschkeProduct(interval, zeros)
    G = szego_from_h(interval, w2n.log_abs, cfg)
    res_c = ctx.zero
    for u in probes:
        lhs = psi_map(interval, u, cfg) ** two_n * blaschke_eval(B, u, cfg) / w2n(u)
        rhs = G(u) ** 2
        res_c = max(res_c, abs(lhs / rhs - 1))
    report = {"eq_c": res_c, "asymptotic3": None, "degree": two_n}
    if comparison is not None and ln_phi is not None:
        Gphi = szego_from_h(interval, ln_phi, cfg)
        res = ctx.zero
        for u in probes:
            lhs = (comparison.C * comparison.phi(u) / psi_map(interval, u, cfg)) ** two_n
            rhs = Gphi(u) ** two_n
            res = max(res, abs(lhs / rhs - 1))
        report["asymptotic3"] = res
    return report
