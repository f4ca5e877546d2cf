"""The operator T on pairs of positive boundary functions and its fixed point.

A pair g = (g1, g2) is stored in log form: χ1 = ln g1 at the Chebyshev
nodes of Δ2 and χ2 = ln g2 at the nodes of Δ1.  One application of T is

    ln g1*(y) = -½ [ endpoint terms + Σ c_k Ψ1(y)^{-k} ],   y ∈ Δ2,

where c_k are the Chebyshev coefficients of the smooth part of
ln(sqrt((b1-x)(x-a1)) h̃ σ1'(x) / g2(x)) on Δ1, and symmetrically for g2*.
The A-side uses h̃ on Δ1; the B-side (for P_n) puts ℓ on Δ2 instead.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConvergenceError, DomainError
from .measures import Measure, MeasurePair
from .numkit import (
    Interval,
    PrecisionConfig,
    cheb_coeffs,
    cheb_grid,
    cheb_transform_matrix,
    clenshaw,
    digits_for,
    mp_context,
    render,
    sup_abs,
    to_mp,
)
from .potential import EquilibriumPair, comparison_functions, log_complex
from .szego import SzegoFn, psi_norm, szego_from_values

# ---------------------------------------------------------------------------
# boundary pairs and the metric


@dataclass(frozen=True)
class BoundaryPair:
    """g1 > 0 on Δ2 and g2 > 0 on Δ1, kept as log tables at Chebyshev nodes."""

    i1: Interval
    i2: Interval
    chi1: tuple  # ln g1 at the nodes of Δ2
    chi2: tuple  # ln g2 at the nodes of Δ1
    bits: int

    def _eval(self, table, iv: Interval, x):
        ctx = mp_context(self.bits)
        m, r = iv.center_radius(ctx)
        c = cheb_coeffs(table, self.bits)
        return ctx.exp(clenshaw(c, (ctx.convert(x) - m) / r, ctx))

    def g1(self, x):
        return self._eval(self.chi1, self.i2, x)

    def g2(self, x):
        return self._eval(self.chi2, self.i1, x)

    def scaled(self, c1, c2) -> "BoundaryPair":
        ctx = mp_context(self.bits)
        l1, l2 = ctx.ln(ctx.convert(c1)), ctx.ln(ctx.convert(c2))
        return BoundaryPair(self.i1, self.i2, tuple(v + l1 for v in self.chi1), tuple(v + l2 for v in self.chi2), self.bits)


def boundary_pair(pair: MeasurePair, g1: Callable, g2: Callable, cfg: PrecisionConfig) -> BoundaryPair:
    """Sample positive g1 on Δ2 and g2 on Δ1."""
    ctx = cfg.ctx
    i1, i2 = pair.intervals
    out = []
    for f, iv in ((g1, i2), (g2, i1)):
        vals = []
        for x in cheb_grid(iv, cfg).nodes:
            v = ctx.convert(f(x))
            if not v > 0:
                raise DomainError(f"boundary function not positive at x={ctx.nstr(x, 15)}")
            vals.append(ctx.ln(v))
        out.append(tuple(vals))
    return BoundaryPair(i1, i2, out[0], out[1], cfg.mantissa_bits)


def constant_pair(pair: MeasurePair, c1, c2, cfg: PrecisionConfig) -> BoundaryPair:
    ctx = cfg.ctx
    l1, l2 = ctx.ln(to_mp(ctx, c1)), ctx.ln(to_mp(ctx, c2))
    n = cfg.quad_order
    return BoundaryPair(*pair.intervals, (l1,) * n, (l2,) * n, cfg.mantissa_bits)


def random_pair(pair: MeasurePair, cfg: PrecisionConfig, rng: random.Random, degree: int = 6) -> BoundaryPair:
    """exp of a random low-degree Chebyshev series on each interval (smooth, positive)."""
    ctx = cfg.ctx
    i1, i2 = pair.intervals
    tabs = []
    for iv in (i2, i1):
        c = [ctx.mpf(rng.uniform(-1, 1)) / (k + 1) for k in range(degree + 1)]
        m, r = iv.center_radius(ctx)
        tabs.append(tuple(clenshaw(c, (x - m) / r, ctx) for x in cheb_grid(iv, cfg).nodes))
    return BoundaryPair(i1, i2, tabs[0], tabs[1], cfg.mantissa_bits)


def metric_d(p: BoundaryPair, q: BoundaryPair):
    """max of the sup norms of ln(p1/q1) on Δ2 and ln(p2/q2) on Δ1 (nodewise)."""
    if (p.i1, p.i2) != (q.i1, q.i2) or len(p.chi1) != len(q.chi1):
        raise DomainError("boundary pairs live on different grids")
    ctx = mp_context(p.bits)
    return max(
        sup_abs(ctx, [a - b for a, b in zip(p.chi1, q.chi1)]),
        sup_abs(ctx, [a - b for a, b in zip(p.chi2, q.chi2)]),
    )


# ---------------------------------------------------------------------------
# the operator


def h_limit(pair: MeasurePair, cfg: PrecisionConfig) -> Callable:
    """h(t) = 1/sqrt(|t - a2||t - b2|) on Δ1, the limit of |h_{n,1}|."""
    ctx = cfg.ctx
    a2, b2 = pair.sigma2.interval.ends(ctx)
    return lambda t: 1 / ctx.sqrt(abs(t - a2) * abs(t - b2))


def ell_limit(pair: MeasurePair, cfg: PrecisionConfig) -> Callable:
    """ℓ(t) = 1/sqrt(|t - a1||t - b1|) on Δ2, the limit of |ℓ_{n,1}|."""
    ctx = cfg.ctx
    a1, b1 = pair.sigma1.interval.ends(ctx)
    return lambda t: 1 / ctx.sqrt(abs(t - a1) * abs(t - b1))


@dataclass(frozen=True, eq=False)
class _Side:
    """Precomputed data for the Szegő function on one interval, seen on the other."""

    own: Interval
    p: Fraction
    q: Fraction
    base: tuple  # ln σ' smooth part + ln(extra factor), at own nodes
    rows: tuple  # Ψ(y)^{-k}, k ≥ 0, at the other interval's nodes
    ends: tuple  # endpoint contribution at those nodes
    T: tuple  # truncated DCT rows


def _side(m: Measure, extra: Callable | None, other: Interval, cfg: PrecisionConfig) -> _Side:
    ctx = cfg.ctx
    iv = m.interval
    half = Fraction(1, 2)
    p, q = m.alpha + half, m.beta + half
    own_nodes = cheb_grid(iv, cfg).nodes
    base = []
    for x in own_nodes:
        v = m.log_smooth(x, ctx)
        if extra is not None:
            v += ctx.ln(extra(x))
        base.append(v)
    mid, r = iv.center_radius(ctx)
    eps = ctx.ldexp(1, -ctx.prec - 8)
    rows, ends = [], []
    lr = ctx.ln(r / 2)
    for y in cheb_grid(other, cfg).nodes:
        zeta = psi_norm(ctx, (y - mid) / r)
        t = 1 / zeta
        row, tk = [ctx.one], ctx.one
        for _ in range(1, cfg.quad_order):
            tk *= t
            if abs(tk) < eps:
                break
            row.append(tk)
        rows.append(tuple(row))
        e = ctx.zero
        if p:
            e += to_mp(ctx, p) * (lr + 2 * ctx.ln(1 - t))
        if q:
            e += to_mp(ctx, q) * (lr + 2 * ctx.ln(1 + t))
        ends.append(e)
    kmax = max(len(r) for r in rows)
    T = cheb_transform_matrix(cfg.quad_order, cfg.mantissa_bits)[:kmax]
    return _Side(iv, p, q, tuple(base), tuple(rows), tuple(ends), T)


def _apply_side(side: _Side, chi_other_on_own, ctx):
    """ln G(h) on the other interval for h with smooth log part base - chi."""
    n = len(side.base)
    vals = [b - c for b, c in zip(side.base, chi_other_on_own)]
    c = [ctx.fdot(row, vals) * 2 / n for row in side.T]
    c[0] /= 2
    return tuple(-(e + ctx.fdot(row, c[: len(row)])) / 2 for row, e in zip(side.rows, side.ends))


@dataclass(frozen=True, eq=False)
class TOperator:
    """T for a fixed pair, h̃ (on Δ1) and ℓ (on Δ2); both factors default to 1."""

    pair: MeasurePair
    cfg: PrecisionConfig
    s1: _Side
    s2: _Side
    h_tilde: Callable | None = None
    ell: Callable | None = None

    def __call__(self, g: BoundaryPair) -> BoundaryPair:
        ctx = self.cfg.ctx
        chi1 = _apply_side(self.s1, g.chi2, ctx)  # g1* on Δ2 from g2 on Δ1
        chi2 = _apply_side(self.s2, g.chi1, ctx)
        return BoundaryPair(g.i1, g.i2, chi1, chi2, g.bits)

    def szego_pair(self, g: BoundaryPair):
        """The Szegő functions (g1*, g2*) themselves, on Ω1 and Ω2."""
        out = []
        for side, chi in ((self.s1, g.chi2), (self.s2, g.chi1)):
            out.append(szego_from_values(side.own, [b - c for b, c in zip(side.base, chi)], self.cfg, side.p, side.q))
        return tuple(out)


def make_T(pair: MeasurePair, cfg: PrecisionConfig, h_tilde: Callable | None = None, ell: Callable | None = None) -> TOperator:
    i1, i2 = pair.intervals
    return TOperator(pair, cfg, _side(pair.sigma1, h_tilde, i2, cfg), _side(pair.sigma2, ell, i1, cfg), h_tilde, ell)


def operator_T(p: BoundaryPair, h_tilde: Callable | None, pair: MeasurePair, cfg: PrecisionConfig,
               ell: Callable | None = None) -> BoundaryPair:
    return make_T(pair, cfg, h_tilde, ell)(p)


def contraction_audit(pair: MeasurePair, cfg: PrecisionConfig, count: int = 20, seed: int = 20240501,
                      h_tilde: Callable | None = None) -> dict:
    """Ratios d(Tp, Tq)/d(p, q) over seeded random smooth pairs, plus the constant-pair case."""
    ctx = cfg.ctx
    T = make_T(pair, cfg, h_tilde)
    rng = random.Random(seed)
    ratios = []
    for _ in range(count):
        p, q = random_pair(pair, cfg, rng), random_pair(pair, cfg, rng)
        ratios.append(metric_d(T(p), T(q)) / metric_d(p, q))
    one = constant_pair(pair, 1, 1, cfg)
    e = constant_pair(pair, ctx.e, ctx.e, cfg)
    const = metric_d(T(one), T(e)) / metric_d(one, e)
    return {"seed": seed, "ratios": ratios, "max_ratio": max(ratios), "constant_ratio": const}


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True, eq=False)
class GPair:
    G1: SzegoFn  # on the complement of Δ1
    G2: SzegoFn
    side: str  # "A" (h̃ on Δ1) or "B" (ℓ on Δ2)
    boundary: BoundaryPair = field(repr=False)
    trace: tuple = field(default=(), repr=False)
    residual: object = None
    pair: MeasurePair = field(default=None, repr=False)
    cfg: PrecisionConfig = field(default=None, repr=False)

    @property
    def sweeps(self) -> int:
        return len(self.trace)

    def to_plain(self, probes: dict | None = None) -> dict:
        """Node tables of (g1, g2), G values at the probes and the iteration record, as decimal strings.

        ``probes`` maps a region name to points; G1 is evaluated off Δ1 and
        G2 off Δ2, so points on the other interval are simply skipped.
        """
        ctx = self.cfg.ctx
        i1, i2 = self.pair.intervals
        n1, n2 = cheb_grid(i1, self.cfg).nodes, cheb_grid(i2, self.cfg).nodes
        vals = {}
        for region, pts in (probes or {}).items():
            rows = []
            for z in pts:
                z = ctx.convert(z)
                row = {"z": z}
                if not i1.contains(z, ctx):
                    row["G1"] = self.G1(z)
                if not i2.contains(z, ctx):
                    row["G2"] = self.G2(z)
                rows.append(row)
            vals[region] = rows
        out = {
            "side": self.side,
            "intervals": [[str(i1.a), str(i1.b)], [str(i2.a), str(i2.b)]],
            "mantissa_bits": self.cfg.mantissa_bits,
            "quad_order": self.cfg.quad_order,
            "sweeps": self.sweeps,
            "residual": self.residual,
            "G1_inf": self.G1.value_at_inf,
            "G2_inf": self.G2.value_at_inf,
            "g1_table": {"nodes": list(n2), "log_values": list(self.boundary.chi1)},
            "g2_table": {"nodes": list(n1), "log_values": list(self.boundary.chi2)},
            "trace": list(self.trace),
            "probes": vals,
        }
        return render(out, digits_for(self.cfg.mantissa_bits))


def fixed_point_G(pair: MeasurePair, h_tilde: Callable | None, cfg: PrecisionConfig, side: str = "A",
                  ell: Callable | None = None) -> GPair:
    """Iterate T from (1, 1) until the metric step drops below fp_tol.

    side "A" uses h̃ (default: the limit h of |h_{n,1}|) on Δ1; side "B" uses
    ℓ (default: its closed-form limit) on Δ2 and no factor on Δ1.
    """
    if side == "A":
        T = make_T(pair, cfg, h_tilde if h_tilde is not None else h_limit(pair, cfg), None)
    elif side == "B":
        T = make_T(pair, cfg, None, ell if ell is not None else ell_limit(pair, cfg))
    else:
        raise DomainError(f"side must be 'A' or 'B', got {side!r}")
    g = constant_pair(pair, 1, 1, cfg)
    trace = []
    for _ in range(cfg.max_iter):
        new = T(g)
        step = metric_d(new, g)
        g = new
        trace.append(step)
        if step < cfg.fp_tol:
            break
    else:
        raise ConvergenceError("fixed-point iteration for T did not converge", trace[-1], trace)
    G1, G2 = T.szego_pair(g)
    gp = GPair(G1, G2, side, g, tuple(trace), None, pair, cfg)
    return GPair(G1, G2, side, g, tuple(trace), boundary_law_residual(gp, T), pair, cfg)


def boundary_law_residual(gp: GPair, T: TOperator | None = None, count: int = 41):
    """max |2 ln|G_k(x)| + ln(sqrt(..) factor σ_k'(x)) - ln G_j(x)| at off-grid interior points."""
    cfg = gp.cfg
    ctx = cfg.ctx
    pair = gp.pair
    if T is None:
        T = make_T(pair, cfg, h_limit(pair, cfg) if gp.side == "A" else None,
                   ell_limit(pair, cfg) if gp.side == "B" else None)
    worst = ctx.zero
    for own, other, m, extra in ((gp.G1, gp.G2, pair.sigma1, T.h_tilde), (gp.G2, gp.G1, pair.sigma2, T.ell)):
        a, b = m.interval.ends(ctx)
        mid, r = m.interval.center_radius(ctx)
        for j in range(1, count + 1):
            x = mid + r * (ctx.mpf(2 * j) / (count + 1) - 1) * ctx.mpf("0.999")
            lhs = 2 * ctx.ln(abs(own.boundary(x))) + ctx.ln(ctx.sqrt((b - x) * (x - a)) * m.density(x, ctx))
            if extra is not None:
                lhs += ctx.ln(extra(x))
            worst = max(worst, abs(lhs - other.log(x)))
    return worst


# ---------------------------------------------------------------------------
# limit formulas


@dataclass(frozen=True, eq=False)
class LimitBundle:
    G: GPair
    eq: EquilibriumPair
    Gstar: GPair | None = None

    def __post_init__(self):
        object.__setattr__(self, "_cmp", comparison_functions(self.eq))

    @property
    def cfg(self):
        return self.G.cfg

    def _G(self, k):
        return self.G.G1 if k == 1 else self.G.G2

    def Phi(self, k, z):
        return self._cmp[k - 1].phi(z)

    def log_Phi(self, k, z):
        return log_complex(self._cmp[k - 1].lam, z)

    def C(self, k):
        return self._cmp[k - 1].C

    def ratio_limit(self, k, z):
        """lim Q_{n,k}/Φ_k^n = G_k(z)/G_k(∞)."""
        G = self._G(k)
        return G(z) / G.value_at_inf

    def kappa_limit(self, k):
        """lim κ_{n,k}/C_k^n = G_k(∞)/sqrt(2π)."""
        ctx = self.cfg.ctx
        return self._G(k).value_at_inf / ctx.sqrt(2 * ctx.pi)

    def kappa_limit_normalized(self, k):
        """G_k(∞) G_j(∞)^{-1/2} / sqrt(2π), j ≠ k.

        The limits of the orthonormal sequences are Szegő functions of data
        divided by f_j = G_j/G_j(∞), not by G_j; G(c h) = c^{-1/2} G(h)
        turns that into the extra factor.  This is the value κ_{n,k}/C_k^n
        is measured to approach.
        """
        ctx = self.cfg.ctx
        return self.kappa_limit(k) / ctx.sqrt(self._G(3 - k).value_at_inf)

    def q_limit(self, k, z):
        ctx = self.cfg.ctx
        return self._G(k)(z) / ctx.sqrt(2 * ctx.pi)

    def P_limit(self, z):
        """lim P_n/Φ_1^n = G1*(z)/G1*(∞), from the B-side fixed point."""
        if self.Gstar is None:
            raise DomainError("the B-side fixed point was not supplied")
        return self.Gstar.G1(z) / self.Gstar.G1.value_at_inf

    def A1_limit(self, z):
        """|κ_{n,2}² A_{n,1}(z)| |Φ2/Φ1|^n → G2(∞)/G1(∞) |G1/G2|(z) / sqrt|(z-b2)(z-a2)|."""
        ctx = self.cfg.ctx
        a2, b2 = self.G.pair.sigma2.interval.ends(ctx)
        G1, G2 = self.G.G1, self.G.G2
        return (G2.value_at_inf / G1.value_at_inf * abs(G1(z) / G2(z))
                / ctx.sqrt(abs((z - b2) * (z - a2))))

    def A0_limit(self, z):
        """|(κ_{n,1}κ_{n,2})² A_{n,0}(z)| |Φ1|^n → |G1(z)|/(π G1(∞)) |∫ dη-integral|."""
        ctx = self.cfg.ctx
        G1 = self.G.G1
        return abs(G1(z)) / (ctx.pi * G1.value_at_inf) * abs(self._eta_transform(z, h_limit(self.G.pair, self.cfg)))

    def _eta_transform(self, z, weight=None):
        ctx = self.cfg.ctx
        grid = cheb_grid(self.G.pair.sigma1.interval, self.cfg)
        if weight is None:
            vals = [1 / (z - x) for x in grid.nodes]
        else:
            vals = [weight(x) / (z - x) for x in grid.nodes]
        return ctx.fsum(vals) * grid.weights[0]

    def A0_limit_corrected(self, z):
        """G1(∞)/(π|G1(z)|) |∫ dη1/(z - x)|: what the proof's two limits actually combine to.

        Φ1^n/Q_{n,1} tends to G1(∞)/G1, and q_{n,1}²|h_{n,1}|dσ1/|Q_{n,2}| has
        mass one, so its weak limit is dη1/π with no h factor.
        """
        ctx = self.cfg.ctx
        G1 = self.G.G1
        return G1.value_at_inf / (ctx.pi * abs(G1(z))) * abs(self._eta_transform(z))

    def rate_factor(self, z):
        """|C2² Φ2(z)² / Φ1(z)|; above 1 on Ω2, so |σ̂2 - a_{n,1}/a_{n,2}| decays like its inverse."""
        ctx = self.cfg.ctx
        return abs(self.C(2) ** 2 * ctx.exp(2 * self.log_Phi(2, z) - self.log_Phi(1, z)))

    def cero_limit(self, z):
        """lim |C2²Φ2²/Φ1|^n |σ̂2 - a_{n,1}/a_{n,2}| = 2π|G1(z)| / (G1(∞)|G2(z)²| sqrt|(z-a2)(z-b2)|)."""
        ctx = self.cfg.ctx
        a2, b2 = self.G.pair.sigma2.interval.ends(ctx)
        G1, G2 = self.G.G1, self.G.G2
        return (2 * ctx.pi * abs(G1(z)) / (G1.value_at_inf * abs(G2(z) ** 2)
                * ctx.sqrt(abs((z - a2) * (z - b2)))))

    def cero_limit_normalized(self, z):
        """2π|G1(z)| / (|G2(z)²| sqrt|(z-a2)(z-b2)|): the stated limit times G1(∞).

        Follows from the A1 asymptote, Q_{n,2}/Φ2^n → G2/G2(∞) and the
        normalized κ_{n,2} constant.
        """
        return self.cero_limit(z) * self.G.G1.value_at_inf

    def anj_limit(self, j, z, s_hat: Callable):
        """lim a_{n,j}/Φ2^n = ŝ_{2,j+1}(z) G2(z)/G2(∞); ``s_hat`` evaluates ŝ_{2,j+1}."""
        return s_hat(z) * self.ratio_limit(2, z)


def theoretical_limits(G: GPair, eq: EquilibriumPair, Gstar: GPair | None = None) -> LimitBundle:
    return LimitBundle(G, eq, Gstar)
