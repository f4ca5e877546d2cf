"""Orthogonal polynomials for fixed and varying weights, multipoint Padé approximants.

Weights are handled as quadrature rules: a list of nodes and (possibly
signed) weights W_i with ∫ f dρ ≈ Σ W_i f(x_i).  A varying weight such as
dμ/|w_2n| is just the base rule rescaled nodewise, so fixed and varying
problems go through the same Gram solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, NumericalError, PrecisionError
from .measures import Measure, markov_transform
from .numkit import Interval, PrecisionConfig, QuadRule, gauss_jacobi, lu_solve, mp_context
from .poly import Poly, RootPoly


def cheb_table(interval: Interval, nodes, deg: int, ctx) -> list:
    """Rows k ≤ deg of T_k(s(x_i))."""
    m, r = interval.center_radius(ctx)
    s = [(x - m) / r for x in nodes]
    rows = [[ctx.one] * len(s)]
    if deg >= 1:
        rows.append(list(s))
    for k in range(2, deg + 1):
        prev, cur = rows[k - 2], rows[k - 1]
        rows.append([2 * t * c - p for t, c, p in zip(s, cur, prev)])
    return rows


def as_rule(weight, interval: Interval, cfg: PrecisionConfig) -> QuadRule:
    """Accept a QuadRule, a Measure, or a dx-density evaluator f(x)."""
    if isinstance(weight, QuadRule):
        return weight
    if isinstance(weight, Measure):
        return weight.rule(cfg)
    base = gauss_jacobi(interval, 0, 0, cfg)
    return base.scaled([weight(x) for x in base.nodes])


@dataclass(frozen=True)
class MonicOP:
    Q: Poly
    tau: object  # (∫ Q² dρ)^(-1/2)
    residual: object  # max_ν |<T_ν, Q>| / (‖T_ν‖ ‖Q‖) for ν < n

    def q(self, z):
        """Orthonormal q_n = τ_n Q_n."""
        return self.tau * self.Q(z)


def gram_solve(rule: QuadRule, interval: Interval, n: int, cfg: PrecisionConfig) -> MonicOP:
    ctx = cfg.ctx
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if n >= max(1, len(rule) // 2):
        raise DomainError(f"degree {n} too large for a {len(rule)}-node rule")
    T = cheb_table(interval, rule.nodes, n, ctx)
    W = rule.weights
    WT = [[w * t for w, t in zip(W, row)] for row in T]
    _, r = interval.center_radius(ctx)
    lead = ctx.one if n == 0 else ctx.ldexp(1, n - 1) / r**n
    if n == 0:
        coeffs = [ctx.one]
    else:
        G = [[ctx.fdot(WT[j], T[k]) for k in range(n)] for j in range(n)]
        rhs = [-ctx.fdot(WT[j], T[n]) for j in range(n)]
        try:
            c = lu_solve(ctx, G, rhs)
        except NumericalError as exc:
            raise PrecisionError(f"Gram system for degree {n}: {exc}") from None
        coeffs = c + [ctx.one]
    Q = Poly(interval, tuple(v / lead for v in coeffs), cfg.mantissa_bits)
    vals = [clen for clen in _eval_rows(T, Q.coeffs, ctx)]
    norm2 = ctx.fdot(W, [v * v for v in vals])
    if not norm2 > 0:
        raise PrecisionError(f"nonpositive norm for degree {n}; weight not positive")
    resid = ctx.zero
    for j in range(n):
        inner = ctx.fdot(WT[j], vals)
        tn = ctx.fdot(WT[j], T[j])
        resid = max(resid, abs(inner) / ctx.sqrt(abs(tn) * norm2))
    return MonicOP(Q, 1 / ctx.sqrt(norm2), resid)


def _eval_rows(T, coeffs, ctx):
    cols = len(T[0])
    return [ctx.fdot([T[k][i] for k in range(len(coeffs))], coeffs) for i in range(cols)]


def monic_op(weight, interval: Interval, n: int, cfg: PrecisionConfig) -> MonicOP:
    """Monic Q_n orthogonal to lower degrees w.r.t. ``weight`` (rule, measure or dx-density)."""
    rule = as_rule(weight, interval, cfg)
    for w in rule.weights:
        if not w > 0:
            raise DomainError("weight not positive at a quadrature node")
    return gram_solve(rule, interval, n, cfg)


def stieltjes_op(weight, interval: Interval, n: int, cfg: PrecisionConfig) -> MonicOP:
    """Same polynomial through the discretized Stieltjes recurrence (check route)."""
    ctx = cfg.ctx
    rule = as_rule(weight, interval, cfg)
    W, X = rule.weights, rule.nodes
    p_prev = Poly(interval, (ctx.zero,), cfg.mantissa_bits)
    p = Poly(interval, (ctx.one,), cfg.mantissa_bits)
    v_prev = [ctx.zero] * len(X)
    v = [ctx.one] * len(X)
    norm_prev = None
    for k in range(n):
        norm = ctx.fdot(W, [t * t for t in v])
        a = ctx.fdot(W, [x * t * t for x, t in zip(X, v)]) / norm
        b = norm / norm_prev if norm_prev is not None else ctx.zero
        p_next = p.mul_linear(a) - p_prev.scale(b)
        v_next = [(x - a) * t - b * tp for x, t, tp in zip(X, v, v_prev)]
        p_prev, p, v_prev, v, norm_prev = p, p_next, v, v_next, norm
    norm = ctx.fdot(W, [t * t for t in v])
    return MonicOP(p, 1 / ctx.sqrt(norm), ctx.zero)


# ---------------------------------------------------------------------------
# varying measures


@dataclass(frozen=True, eq=False)
class VaryingMeasureSeq:
    """dμ_n / |w_2n| on Δ, with the limit data φ, ψ of the construction.

    base(n) gives μ_n (a Measure); w2n(n) the interpolation polynomial as a
    RootPoly; ln_phi and ln_psi are evaluators on Δ.  ``tau`` is the source
    with ½ ln φ = V_τ used to build λ_φ.  ``denominator`` may replace
    |w_2n| by any positive evaluator (n, x) -> value.
    """

    interval: Interval
    base: Callable
    w2n: Callable | None
    ln_phi: Callable
    ln_psi: Callable
    tau: object = None
    denominator: Callable | None = None
    label: str = ""
    _rules: dict = field(default_factory=dict, repr=False)

    def rule(self, n: int, cfg: PrecisionConfig) -> QuadRule:
        key = (n, cfg.key())
        if key not in self._rules:
            base = self.base(n).rule(cfg)
            ctx = cfg.ctx
            if self.denominator is not None:
                den = [self.denominator(n, x) for x in base.nodes]
            else:
                w = self.w2n(n)
                for t in w.roots:
                    if self.interval.contains(t, ctx):
                        raise DomainError(f"w_2n has a zero at {t} on {self.interval}")
                den = [abs(w(x)) for x in base.nodes]
            self._rules[key] = base.scaled([1 / d for d in den])
        return self._rules[key]

    def condition_iv(self, n: int, cfg: PrecisionConfig, count: int = 33):
        """sup |φ^n |w_2n| - 1/ψ| at interior check points."""
        ctx = cfg.ctx
        m, r = self.interval.center_radius(ctx)
        worst = ctx.zero
        for j in range(1, count + 1):
            x = m + r * (ctx.mpf(2 * j) / (count + 1) - 1)
            den = self.denominator(n, x) if self.denominator is not None else abs(self.w2n(n)(x))
            worst = max(worst, abs(ctx.exp(n * self.ln_phi(x)) * den - ctx.exp(-self.ln_psi(x))))
        return worst


def power_family(interval: Interval, t0, cfg: PrecisionConfig, base: Measure) -> VaryingMeasureSeq:
    """w_2n = (x - t0)^{2n}: φ = (x - t0)^{-2}, ψ ≡ 1, τ = δ_{t0}."""
    from .potential import PointMass

    ctx = cfg.ctx
    t0 = ctx.convert(t0)
    if interval.contains(t0, ctx):
        raise DomainError("t0 must lie off the interval")
    return VaryingMeasureSeq(
        interval,
        base=lambda n: base,
        w2n=lambda n: RootPoly((t0,) * (2 * n), ctx.one, cfg.mantissa_bits),
        ln_phi=lambda x: -2 * ctx.ln(abs(x - t0)),
        ln_psi=lambda x: ctx.zero,
        tau=PointMass(t0),
        label=f"(x-{ctx.nstr(t0, 10)})^(2n)",
    )


def fixed_family(base: Measure, cfg: PrecisionConfig) -> VaryingMeasureSeq:
    """w_2n ≡ 1: ordinary orthogonality, φ = ψ = 1."""
    ctx = cfg.ctx
    return VaryingMeasureSeq(
        base.interval,
        base=lambda n: base,
        w2n=lambda n: RootPoly((), ctx.one, cfg.mantissa_bits),
        ln_phi=lambda x: ctx.zero,
        ln_psi=lambda x: ctx.zero,
        label="fixed",
    )


def varying_op(seq: VaryingMeasureSeq, n: int, cfg: PrecisionConfig) -> MonicOP:
    return gram_solve(seq.rule(n, cfg), seq.interval, n, cfg)


def weak_star_diag(seq: VaryingMeasureSeq, g: Callable, n: int, cfg: PrecisionConfig, op: MonicOP | None = None):
    """∫ g q_n² dμ_n/|w_2n|; its limit is the arcsine average (1/π)∫ g dη."""
    ctx = cfg.ctx
    op = op or varying_op(seq, n, cfg)
    rule = seq.rule(n, cfg)
    return op.tau**2 * ctx.fdot(rule.weights, [g(x) * op.Q(x) ** 2 for x in rule.nodes])


# ---------------------------------------------------------------------------
# divided differences and Padé


def divided_difference(p: Poly, rule: QuadRule) -> Poly:
    """The polynomial z ↦ ∫ (p(z) - p(x)) / (z - x) dρ(x), on p's interval.

    Uses (T_k(w) - T_k(s))/(w - s) = 2 Σ'_{j<k} T_j(s) U_{k-1-j}(w), then
    converts the U-series back to the T basis.
    """
    ctx = p.ctx
    n = len(p.coeffs) - 1
    if n <= 0:
        return Poly(p.interval, (ctx.zero,), p.bits)
    m, r = p.interval.center_radius(ctx)
    T = cheb_table(p.interval, rule.nodes, n - 1, ctx)
    mom = [ctx.fdot(rule.weights, row) for row in T]
    mom[0] /= 2
    c = p.coeffs
    u = [ctx.zero] * n  # coefficient of U_m, m < n
    for mdeg in range(n):
        u[mdeg] = 2 / r * ctx.fsum(c[k] * mom[k - 1 - mdeg] for k in range(mdeg + 1, n + 1))
    t = [ctx.zero] * n
    for mdeg, v in enumerate(u):
        # U_m = 2 Σ_{j ≡ m mod 2, j ≤ m} T_j, minus T_0 when m is even
        for j in range(mdeg % 2, mdeg + 1, 2):
            t[j] += 2 * v
        if mdeg % 2 == 0:
            t[0] -= v
    return Poly(p.interval, tuple(t), p.bits)


def truncate(p: Poly, deg: int):
    """(p cut to degree ≤ deg, size of the dropped tail relative to the kept part)."""
    ctx = p.ctx
    keep = p.coeffs[: deg + 1]
    tail = max((abs(v) for v in p.coeffs[deg + 1 :]), default=ctx.zero)
    scale = max((abs(v) for v in keep), default=ctx.zero) or ctx.one
    return Poly(p.interval, tuple(keep), p.bits), tail / scale


@dataclass(frozen=True)
class PadeApproximant:
    P: Poly  # numerator, degree ≤ n-1
    Q: Poly  # monic denominator
    tau: object
    measure: Measure
    w2n: RootPoly
    rule: QuadRule = field(repr=False)  # dμ/|w_2n|
    ortho_residual: object = None
    tail_residual: object = None
    bits: int = 256

    def R(self, z):
        return self.P(z) / self.Q(z)

    def remainder(self, z):
        """(μ̂ - R_n)(z) from the integral expression, free of cancellation."""
        ctx = mp_context(self.bits)
        z = ctx.convert(z)
        if self.measure.interval.contains(z, ctx):
            raise DomainError(f"z={z} on the support")
        w = self.w2n
        sgn = 1 if w(self.measure.interval.ends(ctx)[0]) > 0 else -1
        # rule weights are dμ/|w|, so dμ/w = sgn·weights
        integral = sgn * ctx.fdot(self.rule.weights, [self.Q(x) ** 2 / (z - x) for x in self.rule.nodes])
        return w(z) / self.Q(z) ** 2 * integral

    def remainder_direct(self, z, cfg: PrecisionConfig):
        return markov_transform(self.measure, z, cfg) - self.R(z)


def multipoint_pade(m: Measure, w2n: RootPoly, n: int, cfg: PrecisionConfig) -> PadeApproximant:
    """n-th multipoint Padé approximant of μ̂ interpolating at the zeros of w_2n."""
    ctx = cfg.ctx
    if w2n.degree > 2 * n:
        raise DomainError("deg w_2n must not exceed 2n")
    for t in w2n.roots:
        if m.interval.contains(t, ctx):
            raise DomainError(f"w_2n vanishes at {t} on the support")
    base = m.rule(cfg)
    wv = [w2n(x) for x in base.nodes]
    rule = base.scaled([1 / abs(v) for v in wv])
    op = gram_solve(rule, m.interval, n, cfg)
    Q = op.Q
    d1 = divided_difference(Q, base)
    wpoly = w2n.to_cheb(m.interval)
    d2 = divided_difference(wpoly, base.scaled([Q(x) / v for x, v in zip(base.nodes, wv)]))
    P, tail = truncate(d1 - d2, n - 1)
    return PadeApproximant(P, Q, op.tau, m, w2n, rule, op.residual, tail, cfg.mantissa_bits)
