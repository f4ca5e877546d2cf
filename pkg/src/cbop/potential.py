"""Logarithmic potentials, balayage, scalar and vector equilibrium measures.

Densities are sampled against dη at the Chebyshev nodes of their interval.
If the density is Σ e_k T_k(s) and d_k = π e_k, then for ζ = Ψ(u)

    ∫ ln(u - x) dλ(x) = d_0 ln(r ζ / 2) - Σ_{k≥1} d_k ζ^{-k} / k,
    V_λ(x) = -d_0 ln(r/2) + Σ_{k≥1} d_k T_k(s) / k      (x on the interval),

so potentials need no singular quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConvergenceError, DomainError
from .numkit import (
    ChebGrid,
    Interval,
    PrecisionConfig,
    cheb_coeffs,
    cheb_grid,
    cheb_reference,
    cheb_transform_matrix,
    clenshaw,
    lu_solve,
    matvec,
    mp_context,
    sup_abs,
    to_mp,
)
from .szego import _is_real, psi_norm


@dataclass(frozen=True)
class PointMass:
    t: object  # real point, or None for infinity
    mass: object = 1


@dataclass(frozen=True)
class ChebDensity:
    interval: Interval
    values: tuple  # density w.r.t. dη at the grid nodes
    bits: int

    @property
    def ctx(self):
        return mp_context(self.bits)

    @property
    def order(self) -> int:
        return len(self.values)

    @property
    def mass(self):
        ctx = self.ctx
        return ctx.fsum(self.values) * ctx.pi / self.order

    @property
    def d(self) -> tuple:
        """Coefficients d_k = π e_k."""
        c = self.__dict__.get("_d")
        if c is None:
            ctx = self.ctx
            c = tuple(ctx.pi * v for v in cheb_coeffs(self.values, self.bits))
            object.__setattr__(self, "_d", c)
        return c

    def grid(self) -> ChebGrid:
        return cheb_grid(self.interval, PrecisionConfig(self.bits, self.order))

    def density_eta(self, x):
        """Interpolated density w.r.t. dη at any point of the interval."""
        ctx = self.ctx
        m, r = self.interval.center_radius(ctx)
        return clenshaw(self.d, (x - m) / r, ctx) / ctx.pi

    def density_dx(self, x):
        ctx = self.ctx
        a, b = self.interval.ends(ctx)
        return self.density_eta(x) / ctx.sqrt((b - x) * (x - a))

    def scaled(self, c) -> "ChebDensity":
        return ChebDensity(self.interval, tuple(c * v for v in self.values), self.bits)

    def __add__(self, other: "ChebDensity") -> "ChebDensity":
        if other.interval != self.interval or other.order != self.order:
            raise ValueError("densities live on different grids")
        return ChebDensity(self.interval, tuple(x + y for x, y in zip(self.values, other.values)), self.bits)


def chebyshev_density(interval: Interval, cfg: PrecisionConfig, mass=1) -> ChebDensity:
    """ω_Δ, the arcsine (Chebyshev) measure, times ``mass``."""
    ctx = cfg.ctx
    v = to_mp(ctx, mass) / ctx.pi
    return ChebDensity(interval, (v,) * cfg.quad_order, cfg.mantissa_bits)


def _zeta(ctx, interval, u):
    m, r = interval.center_radius(ctx)
    return psi_norm(ctx, (ctx.convert(u) - m) / r), r


def _inv_series(ctx, d, t, scale_k=True):
    """Σ_{k≥1} d_k t^k / k, truncated once terms are negligible."""
    acc = ctx.zero
    tk = ctx.one
    at = abs(t)
    ak = ctx.one
    big = max(abs(v) for v in d) or ctx.one
    eps = ctx.ldexp(1, -ctx.prec - 4)
    for k in range(1, len(d)):
        tk *= t
        ak *= at
        if ak * big < eps:
            break
        acc += d[k] * tk / k if scale_k else d[k] * tk
    return acc


def log_complex(lam: ChebDensity, u):
    """∫ ln(u - x) dλ(x) with per-point principal logarithms, u off the interval."""
    ctx = lam.ctx
    zeta, r = _zeta(ctx, lam.interval, u)
    d = lam.d
    return d[0] * ctx.ln(r * zeta / 2) - _inv_series(ctx, d, 1 / zeta)


def log_potential(lam: ChebDensity, z):
    """V_λ(z) = ∫ ln(1/|z - x|) dλ(x), anywhere in the plane."""
    ctx = lam.ctx
    z = ctx.convert(z)
    m, r = lam.interval.center_radius(ctx)
    if _is_real(ctx, z):
        s = (ctx.re(z) - m) / r
        if -1 <= s <= 1:
            d = lam.d
            series = clenshaw((ctx.zero,) + tuple(d[k] / k for k in range(1, len(d))), s, ctx)
            return -d[0] * ctx.ln(r / 2) + series
    return -ctx.re(log_complex(lam, z))


# ---------------------------------------------------------------------------
# balayage


def _kernel_row_weights(ctx, target: Interval, t):
    a, b = target.ends(ctx)
    return ctx.sqrt(abs(t - a) * abs(t - b))


def balayage_point(t, target: Interval, cfg: PrecisionConfig, mass=1) -> ChebDensity:
    """Balayage of mass·δ_t onto the target; t=None is the point at infinity."""
    ctx = cfg.ctx
    grid = cheb_grid(target, cfg)
    c = to_mp(ctx, mass)
    if t is None:
        return chebyshev_density(target, cfg, c)
    t = ctx.convert(t)
    if target.contains(t, ctx):
        raise DomainError(f"source point {t} lies on the target {target}")
    k = c * _kernel_row_weights(ctx, target, t) / ctx.pi
    return ChebDensity(target, tuple(k / abs(t - x) for x in grid.nodes), cfg.mantissa_bits)


_KERNELS: dict = {}


def _balayage_matrix(source: Interval, target: Interval, cfg: PrecisionConfig):
    key = (source, target, cfg.key())
    K = _KERNELS.get(key)
    if K is None:
        ctx = cfg.ctx
        src = cheb_grid(source, cfg)
        tgt = cheb_grid(target, cfg)
        n = src.order
        col = [_kernel_row_weights(ctx, target, t) / n for t in src.nodes]
        K = tuple(tuple(c / abs(t - x) for t, c in zip(src.nodes, col)) for x in tgt.nodes)
        _KERNELS[key] = K
    return K


def balayage_onto(source, target: Interval, cfg: PrecisionConfig) -> ChebDensity:
    """Sweep a point mass or a density on a disjoint interval onto ``target``."""
    if source is None:
        return chebyshev_density(target, cfg)
    if isinstance(source, PointMass):
        return balayage_point(source.t, target, cfg, source.mass)
    if not isinstance(source, ChebDensity):
        return balayage_point(source, target, cfg)
    if not source.interval.disjoint(target):
        raise DomainError(f"source support {source.interval} meets target {target}")
    K = _balayage_matrix(source.interval, target, cfg)
    return ChebDensity(target, tuple(matvec(cfg.ctx, K, source.values)), cfg.mantissa_bits)


def source_potential(source, x, ctx):
    if source is None:
        return ctx.zero
    if isinstance(source, PointMass):
        return ctx.zero if source.t is None else -to_mp(ctx, source.mass) * ctx.ln(abs(x - source.t))
    return log_potential(source, x)


def source_mass(source, ctx):
    if source is None:
        return ctx.zero
    if isinstance(source, PointMass):
        return to_mp(ctx, source.mass)
    return source.mass


# ---------------------------------------------------------------------------
# comparison functions


@dataclass(frozen=True)
class ComparisonFn:
    """Φ(u) = exp ∫ ln(u - x) dλ(x) and the constant C = e^γ."""

    interval: Interval
    lam: ChebDensity
    C: object

    def phi(self, u):
        return self.lam.ctx.exp(log_complex(self.lam, u))

    def log_abs_phi(self, u):
        return -log_potential(self.lam, u)

    @property
    def gamma(self):
        return self.lam.ctx.ln(self.C)


@dataclass(frozen=True)
class WeightedEquilibrium:
    lam: ChebDensity
    gamma: object
    residual: object
    tau: object = None

    def comparison(self) -> ComparisonFn:
        return ComparisonFn(self.lam.interval, self.lam, self.lam.ctx.exp(self.gamma))

    def ln_phi(self, x):
        """ln φ = 2 V_τ on the interval."""
        return 2 * source_potential(self.tau, x, self.lam.ctx)


def _constant_fit(ctx, values):
    avg = ctx.fsum(values) / len(values)
    return avg, max(abs(v - avg) for v in values)


def weighted_equilibrium(interval: Interval, tau, cfg: PrecisionConfig) -> WeightedEquilibrium:
    """λ_φ = Bal(τ, Δ) + (1 - c) ω_Δ for the external field ½ ln φ = V_τ.

    ``tau`` is None (c = 0), a :class:`PointMass`, or a ChebDensity on a
    disjoint interval with mass c ≤ 1.
    """
    ctx = cfg.ctx
    c = source_mass(tau, ctx)
    if c > 1 + cfg.fp_tol:
        raise DomainError(f"external mass {ctx.nstr(c, 10)} exceeds 1")
    if c < 0:
        raise DomainError("external mass must be nonnegative")
    lam = chebyshev_density(interval, cfg, 1 - c)
    if tau is not None:
        lam = lam + balayage_onto(tau, interval, cfg)
    grid = cheb_grid(interval, cfg)
    diffs = [log_potential(lam, x) - source_potential(tau, x, ctx) for x in grid.nodes]
    gamma, resid = _constant_fit(ctx, diffs)
    return WeightedEquilibrium(lam, gamma, resid, tau)


# ---------------------------------------------------------------------------
# vector equilibrium


@dataclass(frozen=True)
class EquilibriumPair:
    lambda1: ChebDensity
    lambda2: ChebDensity
    gamma1: object
    gamma2: object
    residual1: object = None
    residual2: object = None
    trace: tuple = field(default=(), repr=False)

    @property
    def intervals(self):
        return self.lambda1.interval, self.lambda2.interval


def _interval_potential_matrix(lam_iv: Interval, target_nodes, cfg: PrecisionConfig):
    """Rows mapping d_k (k ≥ 0) to V at the given off-interval real points."""
    ctx = cfg.ctx
    n = cfg.quad_order
    eps = ctx.ldexp(1, -ctx.prec - 8)
    rows = []
    for x in target_nodes:
        zeta, r = _zeta(ctx, lam_iv, x)
        t = 1 / zeta
        row = [-ctx.ln(abs(r * zeta / 2))]
        tk = ctx.one
        for k in range(1, n):
            tk *= t
            if abs(tk) < eps:
                break
            row.append(tk / k)
        rows.append(row)
    return rows


def _apply_rows(ctx, rows, d):
    return [ctx.fdot(row, d[: len(row)]) for row in rows]


def _self_potential(lam: ChebDensity):
    """V_λ at its own grid nodes."""
    ctx = lam.ctx
    n = lam.order
    d = lam.d
    m, r = lam.interval.center_radius(ctx)
    scaled = [ctx.zero] + [d[k] / k for k in range(1, n)]
    T = cheb_transform_matrix(n, lam.bits)
    # V(x_j) = -d0 ln(r/2) + Σ_k scaled_k T_k(s_j)
    base = -d[0] * ctx.ln(r / 2)
    cols = list(zip(*T))
    return [base + ctx.fdot(scaled, col) for col in cols]


def vector_equilibrium(i1: Interval, i2: Interval, cfg: PrecisionConfig) -> EquilibriumPair:
    """Solve V_{λ1} - ½V_{λ2} = γ1 on Δ1, V_{λ2} - ½V_{λ1} = γ2 on Δ2.

    Sweeps λ1 ← ½Bal(λ2) + ½ω1 then λ2 ← ½Bal(λ1) + ½ω2 until the sup change
    of the dη-densities drops below fp_tol.
    """
    if not i1.disjoint(i2):
        raise DomainError(f"intervals {i1} and {i2} overlap")
    ctx = cfg.ctx
    half_w1 = chebyshev_density(i1, cfg, ctx.mpf(1) / 2)
    half_w2 = chebyshev_density(i2, cfg, ctx.mpf(1) / 2)
    lam1 = chebyshev_density(i1, cfg)
    lam2 = chebyshev_density(i2, cfg)
    trace = []
    for it in range(cfg.max_iter):
        new1 = half_w1 + balayage_onto(lam2, i1, cfg).scaled(ctx.mpf(1) / 2)
        new2 = half_w2 + balayage_onto(new1, i2, cfg).scaled(ctx.mpf(1) / 2)
        step = max(
            sup_abs(ctx, [x - y for x, y in zip(new1.values, lam1.values)]),
            sup_abs(ctx, [x - y for x, y in zip(new2.values, lam2.values)]),
        )
        lam1, lam2 = new1, new2
        trace.append(step)
        if step < cfg.fp_tol:
            break
    else:
        raise ConvergenceError("vector equilibrium iteration did not converge", trace[-1], trace)
    g1 = cheb_grid(i1, cfg)
    g2 = cheb_grid(i2, cfg)
    v11 = _self_potential(lam1)
    v22 = _self_potential(lam2)
    v21 = _apply_rows(ctx, _interval_potential_matrix(i2, g1.nodes, cfg), lam2.d)
    v12 = _apply_rows(ctx, _interval_potential_matrix(i1, g2.nodes, cfg), lam1.d)
    gamma1, res1 = _constant_fit(ctx, [a - b / 2 for a, b in zip(v11, v21)])
    gamma2, res2 = _constant_fit(ctx, [a - b / 2 for a, b in zip(v22, v12)])
    return EquilibriumPair(lam1, lam2, gamma1, gamma2, res1, res2, tuple(trace))


def equilibrium_collocation(i1: Interval, i2: Interval, cfg: PrecisionConfig, order: int = 40):
    """Independent check: solve both equilibrium identities as one dense linear system.

    Unknowns are Chebyshev coefficients (w.r.t. dη) of both densities plus γ1, γ2;
    the cross potentials are assembled by plain product quadrature of ln|x - t|.
    Returns (gamma1, gamma2, coeffs1, coeffs2).
    """
    ctx = cfg.ctx
    K = order
    M = cfg.quad_order
    s_col = cheb_reference(K, cfg.mantissa_bits)
    TK = cheb_transform_matrix(K, cfg.mantissa_bits)  # T_k(s_i), i < K
    TM = cheb_transform_matrix(M, cfg.mantissa_bits)  # T_k(s_j), j < M
    n_unk = 2 * K + 2
    rows, rhs = [], []

    def block(own: Interval, other: Interval, own_first: bool):
        m, r = own.center_radius(ctx)
        mo, ro = other.center_radius(ctx)
        src = [mo + ro * t for t in cheb_reference(M, cfg.mantissa_bits)]
        for i, s in enumerate(s_col):
            x = m + r * s
            row = [ctx.zero] * n_unk
            own_off = 0 if own_first else K
            oth_off = K if own_first else 0
            # V_own(x) = π e0 (-ln(r/2)) + Σ π e_k T_k(s)/k
            row[own_off] = -ctx.pi * ctx.ln(r / 2)
            for k in range(1, K):
                row[own_off + k] = ctx.pi * TK[k][i] / k
            logs = [ctx.ln(abs(x - t)) for t in src]
            for k in range(K):
                # -½ V_other(x) = ½ (π/M) Σ_j ln|x - t_j| e_k T_k(s_j)
                row[oth_off + k] = ctx.pi * ctx.fdot(logs, TM[k]) / (2 * M)
            row[2 * K + (0 if own_first else 1)] = -ctx.one
            rows.append(row)
            rhs.append(ctx.zero)

    block(i1, i2, True)
    block(i2, i1, False)
    for off in (0, K):
        row = [ctx.zero] * n_unk
        row[off] = ctx.pi
        rows.append(row)
        rhs.append(ctx.one)
    sol = lu_solve(ctx, rows, rhs)
    return sol[2 * K], sol[2 * K + 1], sol[:K], sol[K : 2 * K]


def comparison_functions(eq: EquilibriumPair):
    ctx = eq.lambda1.ctx
    return (
        ComparisonFn(eq.lambda1.interval, eq.lambda1, ctx.exp(eq.gamma1)),
        ComparisonFn(eq.lambda2.interval, eq.lambda2, ctx.exp(eq.gamma2)),
    )


# ---------------------------------------------------------------------------
# conformal branches


@dataclass(frozen=True)
class ExteriorFn:
    """F(u) = Ψ(u) exp(Σ c_k Ψ(u)^{-k}) on the complement of an interval."""

    interval: Interval
    coeffs: tuple
    bits: int

    def log(self, u):
        ctx = mp_context(self.bits)
        zeta, _ = _zeta(ctx, self.interval, u)
        return ctx.ln(zeta) + self.coeffs[0] + _inv_series(ctx, self.coeffs, 1 / zeta, scale_k=False)

    def __call__(self, u):
        return mp_context(self.bits).exp(self.log(u))

    def log_abs_boundary(self, x):
        ctx = mp_context(self.bits)
        m, r = self.interval.center_radius(ctx)
        return clenshaw(self.coeffs, (x - m) / r, ctx)

    @property
    def inf_deriv(self):
        ctx = mp_context(self.bits)
        _, r = self.interval.center_radius(ctx)
        return 2 / r * ctx.exp(self.coeffs[0])


@dataclass(frozen=True)
class ConformalBranches:
    F1: ExteriorFn
    F2: ExteriorFn
    residual: object
    trace: tuple = field(default=(), repr=False)

    @property
    def F1_inf_deriv(self):
        return self.F1.inf_deriv

    @property
    def F2_inf_deriv(self):
        return self.F2.inf_deriv

    def constants(self):
        """C_1, C_2 predicted from the derivatives at infinity."""
        ctx = mp_context(self.F1.bits)
        d1, d2 = self.F1_inf_deriv, self.F2_inf_deriv
        return d1 / ctx.sqrt(d2), d2 / ctx.sqrt(d1)


def _exterior_matrix(iv: Interval, nodes, cfg):
    """Rows of (Re Ψ(y)^{-k})_k, k ≥ 1, at real points y off the interval, plus ln|Ψ(y)|."""
    ctx = cfg.ctx
    eps = ctx.ldexp(1, -ctx.prec - 8)
    rows, logs = [], []
    for y in nodes:
        zeta, _ = _zeta(ctx, iv, y)
        t = 1 / zeta
        row = [ctx.one]
        tk = ctx.one
        for _ in range(1, cfg.quad_order):
            tk *= t
            if abs(tk) < eps:
                break
            row.append(tk)
        rows.append(row)
        logs.append(ctx.ln(abs(zeta)))
    return rows, logs


def conformal_branches(i1: Interval, i2: Interval, cfg: PrecisionConfig) -> ConformalBranches:
    """F1, F2 from the boundary laws |F1|² = |F2| on Δ1 and |F2|² = |F1| on Δ2.

    ln|F_k| = ln|Ψ_k| + (harmonic extension of its boundary data u_k); the
    data satisfy u1 = ½ ln|F2| on Δ1 and u2 = ½ ln|F1| on Δ2, a ½-contraction.
    """
    if not i1.disjoint(i2):
        raise DomainError(f"intervals {i1} and {i2} overlap")
    ctx = cfg.ctx
    n = cfg.quad_order
    g1, g2 = cheb_grid(i1, cfg), cheb_grid(i2, cfg)
    E12, L12 = _exterior_matrix(i1, g2.nodes, cfg)  # F1 seen on Δ2
    E21, L21 = _exterior_matrix(i2, g1.nodes, cfg)
    kmax = max(len(r) for r in E12 + E21)
    T = cheb_transform_matrix(n, cfg.mantissa_bits)[:kmax]

    def coeffs(u):
        c = [ctx.fdot(row, u) * 2 / n for row in T]
        c[0] /= 2
        return c

    u1 = [ctx.zero] * n
    u2 = [ctx.zero] * n
    trace = []
    for it in range(cfg.max_iter):
        c2 = coeffs(u2)
        new1 = [(l + ctx.fdot(row, c2[: len(row)])) / 2 for row, l in zip(E21, L21)]
        c1 = coeffs(new1)
        new2 = [(l + ctx.fdot(row, c1[: len(row)])) / 2 for row, l in zip(E12, L12)]
        step = max(sup_abs(ctx, [a - b for a, b in zip(new1, u1)]), sup_abs(ctx, [a - b for a, b in zip(new2, u2)]))
        u1, u2 = new1, new2
        trace.append(step)
        if step < cfg.fp_tol:
            break
    else:
        raise ConvergenceError("conformal branch iteration did not converge", trace[-1], trace)
    F1 = ExteriorFn(i1, tuple(cheb_coeffs(u1, cfg.mantissa_bits)), cfg.mantissa_bits)
    F2 = ExteriorFn(i2, tuple(cheb_coeffs(u2, cfg.mantissa_bits)), cfg.mantissa_bits)
    resid = boundary_law_residual(F1, F2, cfg)
    return ConformalBranches(F1, F2, resid, tuple(trace))


def boundary_law_residual(F1: ExteriorFn, F2: ExteriorFn, cfg: PrecisionConfig, count: int = 41):
    """max |2 ln|F_k| - ln|F_j|| at off-grid interior points of both intervals."""
    ctx = cfg.ctx
    worst = ctx.zero
    for own, other in ((F1, F2), (F2, F1)):
        m, r = own.interval.center_radius(ctx)
        for j in range(1, count + 1):
            x = m + r * (ctx.mpf(2 * j) / (count + 1) - 1) * ctx.mpf("0.999")
            lhs = 2 * own.log_abs_boundary(x)
            rhs = ctx.re(other.log(x))
            worst = max(worst, abs(lhs - rhs))
    return worst
