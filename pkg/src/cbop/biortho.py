"""Cauchy biorthogonal polynomials and multilevel Hermite–Padé systems.

Everything is driven by one tensor quadrature: Gauss rules for σ1 and σ2
and the kernel K[a][b] = 1/(x_a - y_b).  The two intervals are disjoint, so
the kernel is smooth and the tensor rule converges geometrically.

Polynomials are Chebyshev series on their own interval (x-side on Δ1,
y-side on Δ2).  Linear systems are set up in that basis; the monomial
basis only appears in ``cauchy_gram(..., basis="monomial")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import ConvergenceError, DomainError, NumericalError, PrecisionError
from .measures import MeasurePair
from .numkit import Interval, PrecisionConfig, QuadRule, lu_solve
from .orthopoly import cheb_table, divided_difference, gram_solve
from .poly import Poly, RootPoly

# ---------------------------------------------------------------------------
# tensor quadrature


def _kernel(pair: MeasurePair, cfg: PrecisionConfig):
    """(σ1 rule, σ2 rule, K) with K[a][b] = 1/(x_a - y_b); cached on σ1."""
    s1, s2 = pair.sigma1, pair.sigma2
    key = ("cauchy", id(s2), cfg.key())
    hit = s1._cache.get(key)
    if hit is not None and hit[0] is s2:
        return hit[1]
    r1, r2 = s1.rule(cfg), s2.rule(cfg)
    K = [[1 / (x - y) for y in r2.nodes] for x in r1.nodes]
    s1._cache[key] = (s2, (r1, r2, K))
    return r1, r2, K


def _check_size(n: int, cfg: PrecisionConfig, cap: int):
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > cap:
        raise DomainError(f"n={n} exceeds the cap {cap} for quad_order={cfg.quad_order}; raise quad_order")


@dataclass(frozen=True)
class CauchyKernelGram:
    """I[i][j] = ∬ T_i(x) T_j(y) / (x - y) dσ1(x) dσ2(y), T on each interval.

    With ``basis == "monomial"`` the entries use x^i y^j instead.
    """

    pair: MeasurePair
    size: int
    entries: tuple
    basis: str
    bits: int


def _gram_cheb(pair: MeasurePair, n: int, cfg: PrecisionConfig):
    """Chebyshev-basis Gram, summed over σ1 first (x-side transforms at σ2 nodes)."""
    ctx = cfg.ctx
    r1, r2, K = _kernel(pair, cfg)
    i1, i2 = pair.intervals
    T1 = cheb_table(i1, r1.nodes, n, ctx)
    T2 = cheb_table(i2, r2.nodes, n, ctx)
    cols = list(zip(*K))
    out = []
    for i in range(n + 1):
        wt = [w * t for w, t in zip(r1.weights, T1[i])]
        N = [ctx.fdot(wt, col) for col in cols]  # ∫ T_i dσ1 / (x - y_b)
        Nw = [v * w for v, w in zip(N, r2.weights)]
        out.append(tuple(ctx.fdot(Nw, T2[j]) for j in range(n + 1)))
    return tuple(out)


def cauchy_gram(pair: MeasurePair, n: int, cfg: PrecisionConfig | None = None, basis: str = "monomial") -> CauchyKernelGram:
    cfg = cfg or PrecisionConfig()
    _check_size(n, cfg, cfg.quad_order // 2 - 1)
    if basis == "chebyshev":
        return CauchyKernelGram(pair, n + 1, _gram_cheb(pair, n, cfg), basis, cfg.mantissa_bits)
    if basis != "monomial":
        raise DomainError(f"unknown basis {basis!r}")
    ctx = cfg.ctx
    r1, r2, K = _kernel(pair, cfg)
    cols = list(zip(*K))
    out = []
    px = list(r1.weights)
    for i in range(n + 1):
        N = [ctx.fdot(px, col) for col in cols]
        py = [v * w for v, w in zip(N, r2.weights)]
        row = []
        for j in range(n + 1):
            row.append(ctx.fsum(py))
            py = [v * y for v, y in zip(py, r2.nodes)]
        out.append(tuple(row))
        px = [v * x for v, x in zip(px, r1.nodes)]
    return CauchyKernelGram(pair, n + 1, tuple(out), basis, cfg.mantissa_bits)


def pairing(P: Poly, Q: Poly, pair: MeasurePair, cfg: PrecisionConfig):
    """∬ P(x) Q(y) / (x - y) dσ1 dσ2 by direct tensor quadrature."""
    ctx = cfg.ctx
    r1, r2, K = _kernel(pair, cfg)
    u = [w * P(x) for w, x in zip(r1.weights, r1.nodes)]
    v = [w * Q(y) for w, y in zip(r2.weights, r2.nodes)]
    return ctx.fdot(u, [ctx.fdot(row, v) for row in K])


# ---------------------------------------------------------------------------
# biorthogonal pairs


def _monic_from_rows(rows, n: int, interval: Interval, cfg: PrecisionConfig) -> Poly:
    """Chebyshev coefficients c (c_n fixed) with Σ_j rows[i][j] c_j = 0 for i < n, made monic."""
    ctx = cfg.ctx
    if n == 0:
        return Poly(interval, (ctx.one,), cfg.mantissa_bits)
    A = [list(rows[i][:n]) for i in range(n)]
    rhs = [-rows[i][n] for i in range(n)]
    try:
        c = lu_solve(ctx, A, rhs)
    except NumericalError as exc:
        raise PrecisionError(f"biorthogonality system of size {n}: {exc}") from None
    return Poly(interval, tuple(c) + (ctx.one,), cfg.mantissa_bits).monic()


@dataclass(frozen=True)
class BiorthoPair:
    P: Poly  # monic, Δ1
    Q: Poly  # monic, Δ2
    C: object
    n: int
    matrix: tuple = field(repr=False)  # ∬ P_m Q_k / (x - y), m, k ≤ n
    residual: object = None  # max_{m≠k} |B_mk| / sqrt|C_m C_k|
    Ps: tuple = field(default=(), repr=False)
    Qs: tuple = field(default=(), repr=False)


def biorthogonal_pair(pair: MeasurePair, n: int, cfg: PrecisionConfig | None = None) -> BiorthoPair:
    cfg = cfg or PrecisionConfig()
    _check_size(n, cfg, cfg.quad_order // 2 - 1)
    ctx = cfg.ctx
    i1, i2 = pair.intervals
    I = _gram_cheb(pair, n, cfg)
    Ps, Qs = [], []
    for m in range(n + 1):
        # Q_m: Σ_j I[i][j] q_j = 0 for i < m; P_m: Σ_i p_i I[i][j] = 0 for j < m
        Qs.append(_monic_from_rows(I, m, i2, cfg))
        Ps.append(_monic_from_rows([[I[i][j] for i in range(n + 1)] for j in range(n + 1)], m, i1, cfg))
    B = []
    for m in range(n + 1):
        p = list(Ps[m].coeffs) + [ctx.zero] * (n - m)
        row = [ctx.fdot(p, col) for col in zip(*I)]
        B.append(tuple(ctx.fdot(row[: len(Qs[k].coeffs)], Qs[k].coeffs) for k in range(n + 1)))
    resid = off_diagonal_residual(B, ctx)
    C = B[n][n]
    if C == 0:
        raise PrecisionError(f"C_{n} vanished")
    return BiorthoPair(Ps[n], Qs[n], C, n, tuple(B), resid, tuple(Ps), tuple(Qs))


def off_diagonal_residual(B, ctx):
    worst = ctx.zero
    for m, row in enumerate(B):
        for k, v in enumerate(row):
            if m != k:
                worst = max(worst, abs(v) / ctx.sqrt(abs(B[m][m] * B[k][k])))
    return worst


def pairing_matrix(Ps, Qs, pair: MeasurePair, cfg: PrecisionConfig) -> tuple:
    """Biorthogonality matrix recomputed from scratch with the rules of ``cfg``."""
    return tuple(tuple(pairing(P, Q, pair, cfg) for Q in Qs) for P in Ps)


# ---------------------------------------------------------------------------
# zeros of A_{n,1} on Δ1


def _locate_zeros(f: Callable, df: Callable, scale: Callable, interval: Interval, n: int, ctx):
    """The n sign changes of f on a refined grid, each polished by safeguarded Newton."""
    m, r = interval.center_radius(ctx)
    M = max(8 * n + 32, 64)
    xs = [m - r * ctx.cospi(ctx.mpf(k) / M) for k in range(M + 1)]
    vals = [f(x) for x in xs]
    brackets = [(xs[k], xs[k + 1], vals[k], vals[k + 1]) for k in range(M) if vals[k] * vals[k + 1] < 0]
    roots = []
    tol = ctx.ldexp(1, -ctx.prec + 12)
    for lo, hi, flo, fhi in brackets:
        x = (lo + hi) / 2
        for _ in range(4 * ctx.prec):
            fx = f(x)
            if abs(fx) <= tol * scale(x):
                break
            if (fx < 0) == (flo < 0):
                lo, flo = x, fx
            else:
                hi = x
            d = df(x)
            nx = x - fx / d if d else lo
            if not lo < nx < hi:
                nx = (lo + hi) / 2
            if abs(nx - x) <= tol * abs(x):
                x = nx
                break
            x = nx
        roots.append(x)
    return roots


# ---------------------------------------------------------------------------
# multilevel Hermite–Padé systems


@dataclass(frozen=True, eq=False)
class HPSystem:
    """(a_{n,0}, a_{n,1}, a_{n,2}), Q_{n,1}, κ's and h_{n,1} for N(σ1, σ2).

    a_{n,0}, a_{n,1} and a_{n,2} = Q_{n,2} are series on Δ2; Q_{n,1} on Δ1.
    """

    pair: MeasurePair
    n: int
    a0: Poly
    a1: Poly
    a2: Poly
    Q1: Poly
    Q1_zeros: tuple
    kappa1: object
    kappa2: object
    h_nodes: tuple  # h_{n,1} at the σ1 nodes
    residuals: dict
    cfg: PrecisionConfig = field(repr=False)
    _aux: dict = field(default_factory=dict, repr=False)

    @property
    def Q2(self) -> Poly:
        return self.a2

    def H(self, z):
        """H_{n,1}(z) = ∫ Q2² dσ2 / ((z - y) Q1(y)), z off Δ2."""
        ctx = self.cfg.ctx
        z = ctx.convert(z)
        if self.pair.sigma2.interval.contains(z, ctx):
            raise DomainError(f"z={z} on Δ2")
        r2 = self._aux["r2"]
        return ctx.fdot(self._aux["w_sq"], [1 / (z - y) for y in r2.nodes])

    def h(self, z):
        return self.kappa2**2 * self.H(z)

    def A1(self, z):
        """A_{n,1}(z) = Q1(z) ∫ Q2 dσ2 / ((z - y) Q1(y)), z off Δ2."""
        ctx = self.cfg.ctx
        z = ctx.convert(z)
        if self.pair.sigma2.interval.contains(z, ctx):
            raise DomainError(f"z={z} on Δ2")
        r2 = self._aux["r2"]
        return self.Q1(z) * ctx.fdot(self._aux["w_q_q1"], [1 / (z - y) for y in r2.nodes])

    def A0(self, z):
        """A_{n,0}(z) = Q1(z)^{-1} ∫ Q1² H dσ1 / ((z - x) Q2(x)), z off Δ1."""
        ctx = self.cfg.ctx
        z = ctx.convert(z)
        if self.pair.sigma1.interval.contains(z, ctx):
            raise DomainError(f"z={z} on Δ1")
        r1 = self._aux["r1"]
        return ctx.fdot(self._aux["w_a0"], [1 / (z - x) for x in r1.nodes]) / self.Q1(z)

    def A0_nodal(self, z):
        """∫ A_{n,1}(x) dσ1 / (z - x) with A_{n,1} from its σ2 integral at the σ1 nodes."""
        ctx = self.cfg.ctx
        z = ctx.convert(z)
        r1 = self._aux["r1"]
        return ctx.fdot([w * v for w, v in zip(r1.weights, self._aux["A1_nodes"])], [1 / (z - x) for x in r1.nodes])

    def sigma2_hat(self, z):
        ctx = self.cfg.ctx
        r2 = self._aux["r2"]
        return ctx.fdot(r2.weights, [1 / (ctx.convert(z) - y) for y in r2.nodes])

    def s11_hat(self, z):
        ctx = self.cfg.ctx
        r1 = self._aux["r1"]
        return ctx.fdot(r1.weights, [1 / (ctx.convert(z) - x) for x in r1.nodes])

    def s12_hat(self, z):
        ctx = self.cfg.ctx
        r1 = self._aux["r1"]
        return ctx.fdot(self._aux["s12_w"], [1 / (ctx.convert(z) - x) for x in r1.nodes])

    def s21_hat(self, z):
        """∫ σ̂1(y) dσ2(y)/(z - y)."""
        ctx = self.cfg.ctx
        r1, r2 = self._aux["r1"], self._aux["r2"]
        s1 = [ctx.fdot(r1.weights, [1 / (y - x) for x in r1.nodes]) for y in r2.nodes]
        z = ctx.convert(z)
        return ctx.fdot(r2.weights, [v / (z - y) for v, y in zip(s1, r2.nodes)])

    def varying_rule(self, k: int) -> QuadRule:
        """Nodes and weights of q_{n,2}² dσ2/|Q_{n,1}| (k=2) or q_{n,1}²|h_{n,1}| dσ1/|Q_{n,2}| (k=1).

        Both have unit mass by the normalization of the κ's.
        """
        bits = self.cfg.mantissa_bits
        if k == 2:
            k2 = self.kappa2**2
            return QuadRule(self._aux["r2"].nodes, tuple(k2 * abs(w) for w in self._aux["w_sq"]), bits)
        if k == 1:
            k12 = (self.kappa1 * self.kappa2) ** 2
            return QuadRule(self._aux["r1"].nodes, tuple(k12 * abs(w) for w in self._aux["w_a0"]), bits)
        raise DomainError(f"k must be 1 or 2, got {k}")

    def linear_forms(self, z):
        """(a0 - a1 ŝ11 + a2 ŝ12, -a1 + a2 σ̂2) at z: the defining combinations."""
        A0 = self.a0(z) - self.a1(z) * self.s11_hat(z) + self.a2(z) * self.s12_hat(z)
        A1 = -self.a1(z) + self.a2(z) * self.sigma2_hat(z)
        return A0, A1

    @property
    def h_sign(self) -> int:
        signs = {v > 0 for v in self.h_nodes}
        return 0 if len(signs) != 1 else (1 if signs.pop() else -1)


def _ortho_residual(weights, nodes, interval: Interval, poly_vals, n: int, ctx):
    """max_ν<n |∫ T_ν p dρ| / (‖T_ν‖ ‖p‖) for a signed rule, norms taken in |ρ|."""
    if n == 0:
        return ctx.zero
    T = cheb_table(interval, nodes, n - 1, ctx)
    aw = [abs(w) for w in weights]
    pn = ctx.sqrt(ctx.fdot(aw, [v * v for v in poly_vals]))
    wp = [w * v for w, v in zip(weights, poly_vals)]
    worst = ctx.zero
    for row in T:
        tn = ctx.sqrt(ctx.fdot(aw, [t * t for t in row]))
        worst = max(worst, abs(ctx.fdot(wp, row)) / (tn * pn))
    return worst


def _assemble(pair: MeasurePair, n: int, Q2: Poly, Q1: Poly, Q1_zeros, cfg: PrecisionConfig, extra=None) -> HPSystem:
    """Everything downstream of the pair (Q_{n,1}, Q_{n,2})."""
    ctx = cfg.ctx
    r1, r2, K = _kernel(pair, cfg)
    i1, i2 = pair.intervals
    q2_y = [Q2(y) for y in r2.nodes]
    q1_y = [Q1(y) for y in r2.nodes]
    q2_x = [Q2(x) for x in r1.nodes]
    q1_x = [Q1(x) for x in r1.nodes]
    w_sq = [w * v * v / u for w, v, u in zip(r2.weights, q2_y, q1_y)]
    w_q_q1 = [w * v / u for w, v, u in zip(r2.weights, q2_y, q1_y)]
    H_x = [ctx.fdot(row, w_sq) for row in K]
    k2 = 1 / ctx.sqrt(ctx.fsum(abs(v) for v in w_sq))
    k12 = 1 / ctx.sqrt(ctx.fdot(r1.weights, [u * u * abs(h) / abs(v) for u, h, v in zip(q1_x, H_x, q2_x)]))
    k1 = k12 / k2
    # a_{n,1}, a_{n,0} from the divided-difference constructions
    a1 = divided_difference(Q2, r2)
    sig2_x = [ctx.fdot(row, r2.weights) for row in K]
    s12 = QuadRule(r1.nodes, tuple(w * s for w, s in zip(r1.weights, sig2_x)), cfg.mantissa_bits)
    a0 = divided_difference(a1, r1) - divided_difference(Q2, s12)
    A1_x = [ctx.fdot(row, [w * v for w, v in zip(r2.weights, q2_y)]) for row in K]
    residuals = {
        "int3": _ortho_residual(
            [w / u for w, u in zip(r2.weights, q1_y)], r2.nodes, i2, q2_y, n, ctx),
        "int4": _ortho_residual(
            [w * h / v for w, h, v in zip(r1.weights, H_x, q2_x)], r1.nodes, i1, q1_x, n, ctx),
    }
    residuals.update(extra or {})
    aux = {
        "r1": r1,
        "r2": r2,
        "w_sq": w_sq,
        "w_q_q1": w_q_q1,
        "w_a0": [w * u * u * h / v for w, u, h, v in zip(r1.weights, q1_x, H_x, q2_x)],
        "A1_nodes": A1_x,
        "s12_w": s12.weights,
    }
    return HPSystem(pair, n, a0, a1, Q2, Q1, tuple(Q1_zeros), k1, k2,
                    tuple(k2 * k2 * h for h in H_x), residuals, cfg, aux)


def hp_system(pair: MeasurePair, n: int, cfg: PrecisionConfig | None = None) -> HPSystem:
    """Constructive route: Q_{n,2} from the A_{n,1} moment conditions, then the rest.

    The moment matrix is summed in the order opposite to the biorthogonal
    Gram (Cauchy transforms of T_j σ2 at the σ1 nodes first), so agreement
    of a_{n,2} with Q_n is a check between two summation routes.
    """
    cfg = cfg or PrecisionConfig()
    _check_size(n, cfg, cfg.quad_order // 4)
    ctx = cfg.ctx
    r1, r2, K = _kernel(pair, cfg)
    i1, i2 = pair.intervals
    T2 = cheb_table(i2, r2.nodes, n, ctx)
    T1 = cheb_table(i1, r1.nodes, n, ctx)
    # C[j][a] = ∫ T_j(y) dσ2(y) / (x_a - y)
    C = [[ctx.fdot(row, [w * t for w, t in zip(r2.weights, T2[j])]) for row in K] for j in range(n + 1)]
    mom = [[ctx.fdot([w * t for w, t in zip(r1.weights, T1[i])], C[j]) for j in range(n + 1)] for i in range(n + 1)]
    Q2 = _monic_from_rows(mom, n, i2, cfg)
    q2_y = [w * Q2(y) for w, y in zip(r2.weights, r2.nodes)]

    def A1(x):
        return ctx.fdot(q2_y, [1 / (x - y) for y in r2.nodes])

    def dA1(x):
        return -ctx.fdot(q2_y, [1 / (x - y) ** 2 for y in r2.nodes])

    def size(x):
        return ctx.fsum(abs(v / (x - y)) for v, y in zip(q2_y, r2.nodes))

    zeros = _locate_zeros(A1, dA1, size, i1, n, ctx) if n else []
    if len(zeros) != n:
        found = ", ".join(ctx.nstr(z, 12) for z in zeros)
        raise PrecisionError(f"A_{{n,1}} has {len(zeros)} sign changes on {i1}, expected {n}: [{found}]")
    Q1 = RootPoly(tuple(zeros), ctx.one, cfg.mantissa_bits).to_cheb(i1)
    return _assemble(pair, n, Q2, Q1, zeros, cfg)


@dataclass(frozen=True, eq=False)
class HPSystemB:
    """The B-side system: the A-side construction for N(σ2, σ1)."""

    mirror: HPSystem

    n = property(lambda self: self.mirror.n)
    b0 = property(lambda self: self.mirror.a0)
    b1 = property(lambda self: self.mirror.a1)
    b2 = property(lambda self: self.mirror.a2)
    P1 = property(lambda self: self.mirror.Q1)
    P2 = property(lambda self: self.mirror.a2)
    xi1 = property(lambda self: self.mirror.kappa1)
    xi2 = property(lambda self: self.mirror.kappa2)
    ell_nodes = property(lambda self: self.mirror.h_nodes)
    residuals = property(lambda self: self.mirror.residuals)

    def ell(self, z):
        return self.mirror.h(z)

    def B1(self, z):
        return self.mirror.A1(z)

    def B0(self, z):
        return self.mirror.A0(z)


def hp_system_b(pair: MeasurePair, n: int, cfg: PrecisionConfig | None = None) -> HPSystemB:
    return HPSystemB(hp_system(pair.swapped(), n, cfg))


def forms_eval(sys: HPSystem, z):
    """(A_{n,0}(z), A_{n,1}(z)) from the integral representations."""
    return sys.A0(z), sys.A1(z)


# ---------------------------------------------------------------------------
# the polynomial operator T̃_n


def tilde_T_n(hatQ1: Poly, hatQ2: Poly, h_tilde: Callable, pair: MeasurePair, n: int,
              cfg: PrecisionConfig | None = None, h_nodes=None):
    """(Q1*, Q2*): Q2* monic orthogonal for dσ2/|Q̂1|, Q1* for h̃ dσ1/|Q̂2|.

    ``h_tilde`` is evaluated at the σ1 nodes unless ``h_nodes`` supplies them.
    """
    cfg = cfg or PrecisionConfig()
    ctx = cfg.ctx
    i1, i2 = pair.intervals
    r1, r2 = pair.sigma1.rule(cfg), pair.sigma2.rule(cfg)
    w2 =[w / abs(hatQ1(y)) for w, y in zip(r2.weights, r2.nodes)]
    hv = h_nodes if h_nodes is not None else [h_tilde(x) for x in r1.nodes]
    w1 = [w * h / abs(hatQ2(x)) for w, h, x in zip(r1.weights, hv, r1.nodes)]
    for v in w1 + w2:
        if not v > 0 or not ctx.isfinite(v):
            raise DomainError("T̃_n weight not positive (a polynomial vanishes on the other interval?)")
    Q2 = gram_solve(QuadRule(r2.nodes, tuple(w2), cfg.mantissa_bits), i2, n, cfg).Q
    Q1 = gram_solve(QuadRule(r1.nodes, tuple(w1), cfg.mantissa_bits), i1, n, cfg).Q
    return Q1, Q2


def _zero_distance(P: Poly, Q: Poly, ctx):
    zp, zq = P.zeros(), Q.zeros()
    return max((abs(a - b) for a, b in zip(zp, zq)), default=ctx.zero)


def hp_fixed_point_route(pair: MeasurePair, n: int, cfg: PrecisionConfig | None = None, tol=None) -> HPSystem:
    """Iterate T̃_n from monic Chebyshev polynomials, recomputing h̃ = |H_{n,1}| each sweep.

    Stops when the zeros move less than ``tol`` (default resid_tol, so the
    result can be compared with the direct route at that level).
    """
    cfg = cfg or PrecisionConfig()
    _check_size(n, cfg, cfg.quad_order // 4)
    ctx = cfg.ctx
    tol = cfg.resid_tol if tol is None else tol
    r1, r2, K = _kernel(pair, cfg)
    i1, i2 = pair.intervals
    unit = [ctx.zero] * n + [ctx.one]
    Q1 = Poly(i1, tuple(unit), cfg.mantissa_bits).monic()
    Q2 = Poly(i2, tuple(unit), cfg.mantissa_bits).monic()
    trace = []
    for _ in range(cfg.max_iter):
        w_sq = [w * Q2(y) ** 2 / Q1(y) for w, y in zip(r2.weights, r2.nodes)]
        h = [abs(ctx.fdot(row, w_sq)) for row in K]
        N1, N2 = tilde_T_n(Q1, Q2, None, pair, n, cfg, h_nodes=h)
        step = max(_zero_distance(N1, Q1, ctx), _zero_distance(N2, Q2, ctx)) if n else ctx.zero
        Q1, Q2 = N1, N2
        trace.append(step)
        if step < tol:
            break
    else:
        raise ConvergenceError("T̃_n iteration did not converge", trace[-1], trace)
    return _assemble(pair, n, Q2, Q1, Q1.zeros() if n else [], cfg, {"fixed_point_trace": tuple(trace)})
