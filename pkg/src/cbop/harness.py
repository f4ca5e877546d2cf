"""Verification suites: every asymptotic limit becomes an error curve over n.

A suite runs one or more :class:`Scenario` objects and returns a
:class:`ConvergenceReport` per scenario.  Limits are computed from the
potential / szego / fixedpoint side, the polynomials from the orthopoly /
biortho side, and the two meet only here.

Claims come in two modes.  ``limit`` claims pass when the error at the
largest n is below the claim tolerance and the last three errors do not
increase (or are all below 10·fp_tol).  ``identity`` claims must hold at
every n.  Claims marked informational are reported but do not decide the
outcome.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .biortho import hp_system, hp_system_b
from .errors import DomainError, PrecisionError
from .fixedpoint import (
    constant_pair,
    contraction_audit,
    ell_limit,
    fixed_point_G,
    h_limit,
    make_T,
    theoretical_limits,
)
from .measures import Measure, MeasurePair, chebyshev, lebesgue, nikishin
from .numkit import Interval, PrecisionConfig, QuadRule, cheb_grid, digits_for, mp_context, render
from .orthopoly import (
    VaryingMeasureSeq,
    fixed_family,
    gram_solve,
    multipoint_pade,
    power_family,
    varying_op,
)
from .potential import (
    ComparisonFn,
    balayage_onto,
    chebyshev_density,
    comparison_functions,
    conformal_branches,
    equilibrium_collocation,
    log_complex,
    log_potential,
    vector_equilibrium,
    weighted_equilibrium,
)
from .szego import (
    BlaschkeProduct,
    blaschke_eval,
    exterior_probes,
    outer_identity_check,
    psi_map,
    szego_from_measure,
    szego_from_values,
)

CLAIM_TOL = 1e-3
ERROR_DIGITS = 17

# ---------------------------------------------------------------------------
# scenarios


def _distance(z, iv: Interval, ctx):
    a, b = iv.ends(ctx)
    x, y = ctx.re(z), ctx.im(z)
    if a <= x <= b:
        return abs(y)
    return min(abs(z - a), abs(z - b))


def _ring(iv: Interval, cfg: PrecisionConfig, count: int = 12) -> tuple:
    return tuple(exterior_probes(iv, cfg, count))


@dataclass(frozen=True, eq=False)
class Scenario:
    """One configuration to verify.

    ``kind`` selects the suite: varying, pade, biortho, fixed_point or
    crosschecks.  ``family`` picks the denominator sequence for the single
    measure suites: fixed (w ≡ 1), power ((x - t0)^{2n}) or cor_a (the
    varying weight |Φ_τ^{2n}| of a measure τ on the interval).
    """

    name: str
    kind: str
    n_list: tuple
    cfg: PrecisionConfig
    pair: MeasurePair | None = None
    measure: Measure | None = None
    family: str = "fixed"
    t0: object = None
    probes: dict = field(default_factory=dict)
    claim_tol: float = CLAIM_TOL
    symmetric: bool = False

    def __post_init__(self):
        ns = list(self.n_list)
        if not ns or any(int(n) != n or n < 0 for n in ns) or ns != sorted(set(ns)):
            raise DomainError(f"{self.name}: n_list must be increasing nonnegative integers")
        if (self.pair is None) == (self.measure is None) and self.kind != "crosschecks":
            raise DomainError(f"{self.name}: give exactly one of pair and measure")
        ctx = self.cfg.ctx
        ivs = self.intervals
        if not self.probes:
            object.__setattr__(self, "probes", self._default_probes())
        gap = min(iv.length for iv in ivs) / 4
        for region, pts in self.probes.items():
            for z in pts:
                for iv in ivs:
                    if _distance(ctx.convert(z), iv, ctx) < float(gap):
                        raise DomainError(f"{self.name}: probe {z} in {region} is within {gap} of {iv}")

    @property
    def intervals(self):
        return self.pair.intervals if self.pair is not None else (self.measure.interval,)

    @property
    def gap_min(self) -> Fraction:
        return min(iv.length for iv in self.intervals) / 4

    def _default_probes(self) -> dict:
        if self.measure is not None:
            return {"omega": _ring(self.measure.interval, self.cfg)}
        ctx = self.cfg.ctx
        i1, i2 = self.pair.intervals
        gap = float(min(i1.length, i2.length) / 4)
        r1, r2 = _ring(i1, self.cfg), _ring(i2, self.cfg)
        keep = lambda pts: tuple(z for z in pts if _distance(z, i1, ctx) >= gap and _distance(z, i2, ctx) >= gap)
        return {"omega1": keep(r1), "omega2": keep(r2), "outside": keep(r1 + r2)}


# ---------------------------------------------------------------------------
# claims and reports


@dataclass
class Claim:
    name: str
    mode: str = "limit"  # "limit" or "identity"
    tol: float = CLAIM_TOL
    informational: bool = False
    note: str = ""
    ns: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def add(self, n, err):
        self.ns.append(n)
        self.errors.append(err)

    @property
    def final(self):
        return self.errors[-1] if self.errors else None

    def trend_ok(self, floor) -> bool:
        e = self.errors[-3:]
        if len(e) < 3:
            return False
        if all(v < floor for v in e):
            return True
        return e[0] >= e[1] >= e[2]

    def rate(self):
        """exp of the least-squares slope of ln(error) against n over the last half of the run."""
        half = len(self.ns) // 2
        ns, es = self.ns[half:], self.errors[half:]
        pts = [(n, math.log(float(e))) for n, e in zip(ns, es) if e > 0 and math.isfinite(math.log(float(e)))]
        if len(pts) < 2:
            return None
        slope = np.polyfit([p[0] for p in pts], [p[1] for p in pts], 1)[0]
        return math.exp(slope)

    def passed(self, floor) -> bool:
        if not self.errors:
            return False
        if self.mode == "identity":
            return all(e < self.tol for e in self.errors)
        return self.final < self.tol and self.trend_ok(floor)


@dataclass
class ConvergenceReport:
    suite: str
    scenario: str
    bits: int
    claims: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    escalations: list = field(default_factory=list)

    @property
    def floor(self):
        return 10 * PrecisionConfig(self.bits).fp_tol

    def claim(self, name: str) -> Claim:
        for c in self.claims:
            if c.name == name:
                return c
        raise KeyError(name)

    def new(self, name, **kw) -> Claim:
        c = Claim(name, **kw)
        self.claims.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed(self.floor) for c in self.claims if not c.informational)

    def failing(self) -> list:
        return [c.name for c in self.claims if not c.informational and not c.passed(self.floor)]

    def to_plain(self) -> dict:
        floor = self.floor
        claims = []
        for c in self.claims:
            r = c.rate()
            claims.append({
                "name": c.name,
                "mode": c.mode,
                "tol": render(c.tol, ERROR_DIGITS),
                "informational": c.informational,
                "note": c.note,
                "n": list(c.ns),
                "errors": [render(e, ERROR_DIGITS) for e in c.errors],
                "fitted_rate": None if r is None else render(r, 6),
                "trend_ok": c.trend_ok(floor) if c.mode == "limit" else None,
                "passed": c.passed(floor),
            })
        return {
            "suite": self.suite,
            "scenario": self.scenario,
            "mantissa_bits": self.bits,
            "error_digits": ERROR_DIGITS,
            "value_digits": digits_for(self.bits),
            "passed": self.passed,
            "failing": self.failing(),
            "claims": claims,
            "diagnostics": render(self.diagnostics, digits_for(self.bits)),
            "escalations": render(self.escalations, digits_for(self.bits)),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_plain(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", "claim", "n", "error"])
        for c in self.claims:
            for n, e in zip(c.ns, c.errors):
                w.writerow([self.scenario, c.name, n, render(e, ERROR_DIGITS)])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# shared helpers


def _rel(ctx, measured, limit):
    return abs(measured / limit - 1)


def _max_rel(ctx, pairs):
    return max(abs(m / l - 1) for m, l in pairs)


def _phi_pow(cmp: ComparisonFn, n: int, z):
    return cmp.lam.ctx.exp(n * log_complex(cmp.lam, z))


def _sqrt_ext(iv: Interval, z, ctx):
    """sqrt((z - a)(z - b)), positive for z > b."""
    m, r = iv.center_radius(ctx)
    w = (ctx.convert(z) - m) / r
    if not isinstance(w, ctx.mpc) or w.imag == 0:
        w = ctx.re(w)
        return r * ctx.sign(w) * ctx.sqrt(w * w - 1)
    return r * ctx.sqrt(w - 1) * ctx.sqrt(w + 1)


def _escalate(report: ConvergenceReport, label: str, n: int, cfg: PrecisionConfig, run: Callable,
              residual: Callable):
    """run(cfg) and, if it raises PrecisionError or its residual exceeds resid_tol, once more at doubled bits."""
    tol = cfg.resid_tol
    try:
        out = run(cfg)
        res = residual(out)
        if res <= tol:
            return out
        reason = f"residual {mp_context(64).nstr(res, 5)} above resid_tol"
    except PrecisionError as exc:
        out, reason = None, str(exc)
    hi = cfg.with_bits(2 * cfg.mantissa_bits)
    entry = {"what": label, "n": n, "from_bits": cfg.mantissa_bits, "to_bits": hi.mantissa_bits, "reason": reason}
    try:
        better = run(hi)
    except PrecisionError as exc:
        entry["outcome"] = f"failed: {exc}"
        report.escalations.append(entry)
        if out is None:
            raise
        return out
    res = residual(better)
    entry["outcome"] = "ok" if res <= tol else "residual still above resid_tol"
    entry["residual"] = res
    report.escalations.append(entry)
    return better


@lru_cache(maxsize=256)
def cached_hp(pair: MeasurePair, n: int, cfg: PrecisionConfig, side: str = "A"):
    """hp_system (side A) or hp_system_b (side B), memoized per (pair, n, cfg)."""
    return hp_system(pair, n, cfg) if side == "A" else hp_system_b(pair, n, cfg)


def _hp_residual(S):
    return max(S.residuals["int3"], S.residuals["int4"])


def _hp_escalated(report, pair, n, cfg, side):
    return _escalate(report, f"hp_system[{side}]", n, cfg, lambda c: cached_hp(pair, n, c, side), _hp_residual)


@lru_cache(maxsize=16)
def pair_limits(pair: MeasurePair, cfg: PrecisionConfig):
    eq = vector_equilibrium(*pair.intervals, cfg)
    GA = fixed_point_G(pair, None, cfg, "A")
    GB = fixed_point_G(pair, None, cfg, "B")
    return eq, GA, GB, theoretical_limits(GA, eq, GB)


# ---------------------------------------------------------------------------
# single-interval suites


def _cor_a_source(iv: Interval, cfg: PrecisionConfig):
    """τ on the interval: the balayage of the arcsine measure of [b+2, b+3]."""
    far = Interval(iv.b + 2, iv.b + 3)
    return balayage_onto(chebyshev_density(far, cfg), iv, cfg)


def _varying_setup(sc: Scenario, cfg: PrecisionConfig):
    """(seq, Φ/C comparison, w_2n maker or None) for the scenario's family."""
    ctx = cfg.ctx
    mu, iv = sc.measure, sc.measure.interval
    if sc.family == "fixed":
        seq = fixed_family(mu, cfg)
        return seq, weighted_equilibrium(iv, None, cfg).comparison(), seq.w2n
    if sc.family == "power":
        seq = power_family(iv, sc.t0, cfg, mu)
        return seq, weighted_equilibrium(iv, seq.tau, cfg).comparison(), seq.w2n
    if sc.family == "cor_a":
        tau = _cor_a_source(iv, cfg)
        seq = VaryingMeasureSeq(
            iv,
            base=lambda n: mu,
            w2n=None,
            ln_phi=lambda x: 2 * log_potential(tau, x),
            ln_psi=lambda x: ctx.zero,
            tau=tau,
            denominator=lambda n, x: ctx.exp(-2 * n * log_potential(tau, x)),
            label="|Phi_tau|^(2n)",
        )
        return seq, ComparisonFn(iv, tau, ctx.one), None
    raise DomainError(f"{sc.name}: unsupported family {sc.family!r}")


def verify_varying(sc: Scenario) -> ConvergenceReport:
    """Strong and constant limits for orthonormal polynomials with varying weights."""
    cfg, ctx = sc.cfg, sc.cfg.ctx
    rep = ConvergenceReport("varying", sc.name, cfg.mantissa_bits)
    seq, cmp, w_of_n = _varying_setup(sc, cfg)
    iv = sc.measure.interval
    G = szego_from_measure(sc.measure, cfg)  # ψ ≡ 1 for every bundled family
    root = ctx.sqrt(2 * ctx.pi)
    probes = sc.probes["omega"]
    G_at = [G(z) for z in probes]
    tol = sc.claim_tol
    strong = rep.new("strong", tol=tol)
    const = rep.new("constante", tol=tol)
    asintc = rep.new("asintc", tol=tol)
    asintb = rep.new("asintb", tol=tol) if w_of_n is not None else None
    l1 = rep.new("l1_identity", mode="identity", tol=cfg.fp_tol) if sc.family == "power" else None
    cond_iv = []
    for n in sc.n_list:
        op = _escalate(rep, "varying_op", n, cfg,
                       lambda c: varying_op(_varying_setup(sc, c)[0], n, c), lambda o: o.residual)
        Cn = cmp.C**n
        phin = [_phi_pow(cmp, n, z) for z in probes]
        strong.add(n, _max_rel(ctx, [(op.q(z) / (Cn * p), g / root) for z, p, g in zip(probes, phin, G_at)]))
        const.add(n, _rel(ctx, op.tau / Cn, G.value_at_inf / root))
        asintc.add(n, _max_rel(ctx, [(op.Q(z) / p, g / G.value_at_inf) for z, p, g in zip(probes, phin, G_at)]))
        if asintb is not None:
            w = w_of_n(n)
            B = BlaschkeProduct(iv, tuple(w.roots) + (None,) * (2 * n - w.degree))
            vals = [(op.q(z) ** 2 * blaschke_eval(B, z, cfg) / w(z), g * g / (2 * ctx.pi)) for z, g in zip(probes, G_at)]
            asintb.add(n, _max_rel(ctx, vals))
        if l1 is not None:
            out = outer_identity_check(w_of_n(n), seq.ln_phi, iv, cfg, cmp, n, list(probes))
            l1.add(n, max(out["eq_c"], out["asymptotic3"]))
        cond_iv.append(seq.condition_iv(n, cfg))
    rep.diagnostics = {"G_inf": G.value_at_inf, "C": cmp.C, "condition_iv": cond_iv, "family": sc.family}
    return rep


def verify_pade(sc: Scenario) -> ConvergenceReport:
    """Multipoint Padé remainders against their Szegő-function limits."""
    cfg, ctx = sc.cfg, sc.cfg.ctx
    rep = ConvergenceReport("pade", sc.name, cfg.mantissa_bits)
    seq, cmp, w_of_n = _varying_setup(sc, cfg)
    if w_of_n is None:
        raise DomainError(f"{sc.name}: Padé approximants need a polynomial w_2n")
    mu, iv = sc.measure, sc.measure.interval
    G = szego_from_measure(mu, cfg)
    probes = sc.probes["omega"]
    lim = [2 * ctx.pi / (G(z) ** 2 * _sqrt_ext(iv, z, ctx)) for z in probes]
    blaschke = rep.new("blaschke_limit", tol=sc.claim_tol)
    weighted = rep.new("weighted_limit", tol=sc.claim_tol)
    ident = rep.new("remainder_identity", mode="identity", tol=cfg.resid_tol)
    rems = []
    for n in sc.n_list:
        w = w_of_n(n)
        R = _escalate(rep, "multipoint_pade", n, cfg, lambda c: multipoint_pade(mu, _varying_setup(sc, c)[2](n), n, c),
                      lambda p: p.ortho_residual)
        B = BlaschkeProduct(iv, tuple(w.roots) + (None,) * (2 * n - w.degree))
        rem = [R.remainder(z) for z in probes]
        rems.append(rem)
        blaschke.add(n, _max_rel(ctx, [(r / blaschke_eval(B, z, cfg), l) for r, z, l in zip(rem, probes, lim)]))
        weighted.add(n, _max_rel(ctx, [(cmp.C ** (2 * n) * _phi_pow(cmp, 2 * n, z) * r / w(z), l)
                                       for r, z, l in zip(rem, probes, lim)]))
        # the direct difference cancels, so it can only be held to |μ̂| resid_tol
        ident.add(n, max(abs(r - R.remainder_direct(z, cfg)) / abs(R.R(z)) for r, z in zip(rem, probes)))
    if sc.family == "fixed" and len(sc.n_list) >= 2:
        # slope of ln|remainder| in n against -2 ln|Ψ(z)|, probe by probe
        slope = rep.new("classical_rate", mode="identity", tol=0.02)
        ns = list(sc.n_list)
        half = len(ns) // 2
        worst = 0.0
        for j, z in enumerate(probes):
            ys = [math.log(float(abs(rems[i][j]))) for i in range(half, len(ns))]
            fit = np.polyfit(ns[half:], ys, 1)[0]
            expect = -2 * math.log(float(abs(psi_map(iv, z, cfg))))
            worst = max(worst, abs(fit / expect - 1))
        slope.add(ns[-1], worst)
    rep.diagnostics = {"family": sc.family}
    return rep


# ---------------------------------------------------------------------------
# two-interval suites


def verify_biortho(sc: Scenario) -> ConvergenceReport:
    """Strong asymptotics of Q_{n,1}, Q_{n,2}, P_n, κ's, forms and a_{n,j}."""
    cfg, ctx = sc.cfg, sc.cfg.ctx
    pair = sc.pair
    rep = ConvergenceReport("biortho", sc.name, cfg.mantissa_bits)
    eq, GA, GB, L = pair_limits(pair, cfg)
    c1, c2 = comparison_functions(eq)
    P1, P2, Pout = sc.probes["omega1"], sc.probes["omega2"], sc.probes["outside"]
    ns = nikishin(pair, cfg)
    s21 = ns.s21_rule()
    r2 = pair.sigma2.rule(cfg)
    sig2 = {id(z): ctx.fdot(r2.weights, [1 / (z - y) for y in r2.nodes]) for z in P2}
    s21v = {id(z): ctx.fdot(s21.weights, [1 / (z - y) for y in s21.nodes]) for z in P2}
    lim = {
        "Q2": [L.ratio_limit(2, z) for z in P2],
        "Q1": [L.ratio_limit(1, z) for z in P1],
        "P": [L.P_limit(z) for z in P1],
        "A1": [L.A1_limit(z) for z in Pout],
        "A0": [L.A0_limit(z) for z in P1],
        "A0c": [L.A0_limit_corrected(z) for z in P1],
        "a1": [sig2[id(z)] * L.ratio_limit(2, z) for z in P2],
        "a0": [s21v[id(z)] * L.ratio_limit(2, z) for z in P2],
        "cero": [L.cero_limit(z) for z in P2],
        "ceroN": [L.cero_limit_normalized(z) for z in P2],
    }
    rate = [L.rate_factor(z) for z in P2]
    tol = sc.claim_tol
    cl = {name: rep.new(name, tol=tol) for name in (
        "Q2_ratio", "Q1_ratio", "kappa1", "kappa2", "P_ratio", "A1_form", "A0_form", "a1_poly", "a0_poly", "cero")}
    note = "constant with G_j(inf)^(-1/2), from f_j = G_j/G_j(inf) in the limit data"
    info = {
        "kappa1_normalized": rep.new("kappa1_normalized", tol=tol, informational=True, note=note),
        "kappa2_normalized": rep.new("kappa2_normalized", tol=tol, informational=True, note=note),
        "A0_form_corrected": rep.new("A0_form_corrected", tol=tol, informational=True,
                                     note="G1(inf)/|G1| and the plain arcsine transform"),
        "cero_normalized": rep.new("cero_normalized", tol=tol, informational=True,
                                   note="stated limit times G1(inf)"),
    }
    # 2V2 - V1 - 2γ2 < 0 on Ω2 makes |C2²Φ2²/Φ1| exceed one; its inverse is the decay rate
    bound = rep.new("cero_decay_rate_below_one", mode="identity", tol=1.0,
                    note="max over probes of |Phi1/(C2^2 Phi2^2)|")
    mirror = rep.new("mirror_identity", mode="identity", tol=cfg.fp_tol) if sc.symmetric else None
    k_lim = (L.kappa_limit(1), L.kappa_limit(2))
    k_norm = (L.kappa_limit_normalized(1), L.kappa_limit_normalized(2))
    last_valid = None
    for n in sc.n_list:
        try:
            S = _hp_escalated(rep, pair, n, cfg, "A")
            SB = _hp_escalated(rep, pair, n, cfg, "B")
        except PrecisionError as exc:
            rep.diagnostics["stopped"] = f"n={n}: {exc}"
            break
        last_valid = n
        f1 = {id(z): _phi_pow(c1, n, z) for z in P1 + Pout + P2}
        f2 = {id(z): _phi_pow(c2, n, z) for z in P1 + Pout + P2}
        k1, k2 = abs(S.kappa1), abs(S.kappa2)
        C1n, C2n = c1.C**n, c2.C**n
        cl["Q2_ratio"].add(n, _max_rel(ctx, [(S.Q2(z) / f2[id(z)], v) for z, v in zip(P2, lim["Q2"])]))
        cl["Q1_ratio"].add(n, _max_rel(ctx, [(S.Q1(z) / f1[id(z)], v) for z, v in zip(P1, lim["Q1"])]))
        cl["P_ratio"].add(n, _max_rel(ctx, [(SB.P2(z) / f1[id(z)], v) for z, v in zip(P1, lim["P"])]))
        cl["kappa1"].add(n, _rel(ctx, k1 / C1n, k_lim[0]))
        cl["kappa2"].add(n, _rel(ctx, k2 / C2n, k_lim[1]))
        info["kappa1_normalized"].add(n, _rel(ctx, k1 / C1n, k_norm[0]))
        info["kappa2_normalized"].add(n, _rel(ctx, k2 / C2n, k_norm[1]))
        cl["A1_form"].add(n, _max_rel(ctx, [(abs(k2**2 * S.A1(z)) * abs(f2[id(z)] / f1[id(z)]), v)
                                            for z, v in zip(Pout, lim["A1"])]))
        a0m = [abs((k1 * k2) ** 2 * S.A0(z)) * abs(f1[id(z)]) for z in P1]
        cl["A0_form"].add(n, _max_rel(ctx, list(zip(a0m, lim["A0"]))))
        info["A0_form_corrected"].add(n, _max_rel(ctx, list(zip(a0m, lim["A0c"]))))
        cl["a1_poly"].add(n, _max_rel(ctx, [(S.a1(z) / f2[id(z)], v) for z, v in zip(P2, lim["a1"])]))
        cl["a0_poly"].add(n, _max_rel(ctx, [(S.a0(z) / f2[id(z)], v) for z, v in zip(P2, lim["a0"])]))
        # σ̂2 - a1/a2 = A_{n,1}/a_{n,2}; the integral form of A_{n,1} avoids the cancellation
        cero = [rf**n * abs(S.A1(z) / S.Q2(z)) for z, rf in zip(P2, rate)]
        cl["cero"].add(n, _max_rel(ctx, list(zip(cero, lim["cero"]))))
        info["cero_normalized"].add(n, _max_rel(ctx, list(zip(cero, lim["ceroN"]))))
        bound.add(n, max(1 / v for v in rate))
        if mirror is not None:
            sgn = -1 if n % 2 else 1
            mirror.add(n, max(abs(SB.P2(z) - sgn * S.Q2(-z)) / abs(S.Q2(-z)) for z in P1))
    rep.diagnostics.update({
        "last_valid_n": last_valid,
        "C1": c1.C, "C2": c2.C,
        "G1_inf": GA.G1.value_at_inf, "G2_inf": GA.G2.value_at_inf,
        "G1star_inf": GB.G1.value_at_inf, "G2star_inf": GB.G2.value_at_inf,
        "kappa_limits": list(k_lim), "kappa_limits_normalized": list(k_norm),
        "fixed_point_sweeps": [GA.sweeps, GB.sweeps],
    })
    return rep


def _prop2(mu: Measure, cmp: ComparisonFn, n: int, cfg: PrecisionConfig):
    """Orthonormal q̃_n for dμ/|Φ^{2n}|, as a MonicOP."""
    ctx = cfg.ctx
    rule = mu.rule(cfg)
    w = [v * ctx.exp(2 * n * log_potential(cmp.lam, x)) for v, x in zip(rule.weights, rule.nodes)]
    return gram_solve(QuadRule(rule.nodes, tuple(w), cfg.mantissa_bits), mu.interval, n, cfg)


def _kappa_star(rule: QuadRule, Q, den: Callable, extra=None):
    ctx = mp_context(rule.bits)
    ex = extra or [ctx.one] * len(rule.nodes)
    return 1 / ctx.sqrt(ctx.fsum(w * e * Q(x) ** 2 / abs(den(x)) for w, e, x in zip(rule.weights, ex, rule.nodes)))


def verify_fixed_point(sc: Scenario) -> ConvergenceReport:
    """Contraction audit, fixed-point residuals, and the prescribed-asymptotics propositions."""
    from .biortho import tilde_T_n

    cfg, ctx = sc.cfg, sc.cfg.ctx
    pair = sc.pair
    i1, i2 = pair.intervals
    rep = ConvergenceReport("fixed_point", sc.name, cfg.mantissa_bits)
    audit = contraction_audit(pair, cfg, h_tilde=h_limit(pair, cfg))
    rep.new("contraction_max_ratio", mode="identity", tol=0.51).add(0, audit["max_ratio"])
    rep.new("contraction_constant_pair", mode="identity", tol=ctx.ldexp(1, -64)).add(
        0, abs(audit["constant_ratio"] - ctx.mpf(1) / 2))
    eq, GA, GB, L = pair_limits(pair, cfg)
    sweep_cap = math.log2(1 / float(cfg.fp_tol)) + 5
    for tag, G in (("A", GA), ("B", GB)):
        rep.new(f"boundary_law_{tag}", mode="identity", tol=10 * cfg.fp_tol).add(0, G.residual)
        rep.new(f"sweeps_{tag}", mode="identity", tol=sweep_cap + 1e-9).add(0, G.sweeps)
        ratios = [b / a for a, b in zip(G.trace, G.trace[1:]) if a > 0]
        rep.new(f"trace_ratio_{tag}", mode="identity", tol=0.55).add(0, max(ratios[1:] or ratios or [0]))
    # replacing g2 by c g2 multiplies g1* by c^{1/2}
    T = make_T(pair, cfg, h_limit(pair, cfg))
    base = constant_pair(pair, 1, 1, cfg)
    c = ctx.mpf(3)
    moved = constant_pair(pair, 1, c, cfg)
    t0, t1 = T(base), T(moved)
    shift = max(abs(b - a - ctx.ln(c) / 2) for a, b in zip(t0.chi1, t1.chi1))
    rep.new("scaling_law", mode="identity", tol=cfg.resid_tol).add(0, shift)
    if sc.symmetric:
        mir = max(max(abs(a - b) for a, b in zip(GA.boundary.chi1, reversed(GB.boundary.chi2))),
                  max(abs(a - b) for a, b in zip(GA.boundary.chi2, reversed(GB.boundary.chi1))))
        rep.new("mirror_A_B", mode="identity", tol=cfg.fp_tol).add(0, mir)
    # prop2 and the T̃_n image limits
    c1, c2 = comparison_functions(eq)
    Gm = (szego_from_measure(pair.sigma1, cfg), szego_from_measure(pair.sigma2, cfg))
    root = ctx.sqrt(2 * ctx.pi)
    P = (sc.probes["omega1"], sc.probes["omega2"])
    h = h_limit(pair, cfg)
    f = (lambda x: Gm[0](x) / Gm[0].value_at_inf, lambda x: Gm[1](x) / Gm[1].value_at_inf)
    half = Fraction(1, 2)
    s1, s2 = pair.sigma1, pair.sigma2
    G1s = szego_from_values(i1, [s1.log_smooth(x, ctx) + ctx.ln(h(x)) - ctx.ln(f[1](x)) for x in cheb_grid(i1, cfg).nodes],
                            cfg, s1.alpha + half, s1.beta + half)
    G2s = szego_from_values(i2, [s2.log_smooth(x, ctx) - ctx.ln(f[0](x)) for x in cheb_grid(i2, cfg).nodes],
                            cfg, s2.alpha + half, s2.beta + half)
    tol = sc.claim_tol
    p2 = [rep.new(f"prop2_q{k}", tol=tol) for k in (1, 2)]
    lf = [rep.new(f"limfund1_q{k}", tol=tol) for k in (1, 2)]
    cd = [rep.new(f"conductor1_k{k}", tol=tol) for k in (1, 2)]
    ls = [rep.new(f"limfund1_star_Q{k}", tol=tol) for k in (1, 2)]
    cmps = (c1, c2)
    Gstar = (G1s, G2s)
    r1, r2 = s1.rule(cfg), s2.rule(cfg)
    for n in sc.n_list:
        ops = [_prop2(m, cm, n, cfg) for m, cm in zip((s1, s2), cmps)]
        for k in range(2):
            p2[k].add(n, _max_rel(ctx, [(ops[k].q(z) / _phi_pow(cmps[k], n, z), Gm[k](z) / root) for z in P[k]]))
        Q1s, Q2s = tilde_T_n(ops[0].Q, ops[1].Q, h, pair, n, cfg)
        kap = (_kappa_star(r1, Q1s, ops[1].Q, [h(x) for x in r1.nodes]), _kappa_star(r2, Q2s, ops[0].Q))
        Qs = (Q1s, Q2s)
        for k in range(2):
            Cn = cmps[k].C ** n
            lf[k].add(n, _max_rel(ctx, [(kap[k] * Qs[k](z) / (Cn * _phi_pow(cmps[k], n, z)), Gstar[k](z) / root)
                                        for z in P[k]]))
            cd[k].add(n, _rel(ctx, kap[k] / Cn, Gstar[k].value_at_inf / root))
            ls[k].add(n, _max_rel(ctx, [(Qs[k](z) / _phi_pow(cmps[k], n, z), Gstar[k](z) / Gstar[k].value_at_inf)
                                        for z in P[k]]))
    rep.diagnostics = {"audit_seed": audit["seed"], "audit_ratios": audit["ratios"],
                       "constant_ratio": audit["constant_ratio"], "sweeps": [GA.sweeps, GB.sweeps],
                       "trace_A": list(GA.trace)}
    return rep


# test functions of s = (x - m)/r and their arcsine averages
WEAK_TESTS = (
    ("s", lambda s: s, lambda ctx: ctx.zero),
    ("s2", lambda s: s * s, lambda ctx: ctx.mpf(1) / 2),
    ("inv", lambda s: 1 / (2 - s), lambda ctx: 1 / ctx.sqrt(3)),
)


def verify_crosschecks(sc: Scenario) -> ConvergenceReport:
    """Equilibrium consistency, the conformal route to Φ_k and C_k, |h_{n,1}| → h, weak-star limits."""
    cfg, ctx = sc.cfg, sc.cfg.ctx
    pair = sc.pair
    i1, i2 = pair.intervals
    rep = ConvergenceReport("crosschecks", sc.name, cfg.mantissa_bits)
    eq = vector_equilibrium(i1, i2, cfg)
    rep.new("equilibrium_residual", mode="identity", tol=cfg.equil_tol).add(0, max(eq.residual1, eq.residual2))
    g1, g2, _, _ = equilibrium_collocation(i1, i2, cfg)
    rep.new("equilibrium_collocation", mode="identity", tol=10 * cfg.equil_tol).add(
        0, max(abs(g1 - eq.gamma1), abs(g2 - eq.gamma2)))
    if sc.symmetric:
        mir = max(abs(a - b) for a, b in zip(eq.lambda1.values, reversed(eq.lambda2.values)))
        rep.new("equilibrium_mirror", mode="identity", tol=cfg.fp_tol).add(0, mir)
    cb = conformal_branches(i1, i2, cfg)
    c1, c2 = comparison_functions(eq)
    probes = tuple(exterior_probes(i1, cfg, 10)) + tuple(exterior_probes(i2, cfg, 10))
    worst = ctx.zero
    for cmp, F in ((c1, cb.F1), (c2, cb.F2)):
        for z in probes:
            worst = max(worst, abs(F(z) / F.inf_deriv / cmp.phi(z) - 1))
    rep.new("otro_phi", mode="identity", tol=10 * cfg.fp_tol).add(0, worst)
    K1, K2 = cb.constants()
    rep.new("otro_C", mode="identity", tol=10 * cfg.fp_tol).add(0, max(abs(K1 / c1.C - 1), abs(K2 / c2.C - 1)))
    h, ell = h_limit(pair, cfg), ell_limit(pair, cfg)
    hc = rep.new("h_limit", tol=sc.claim_tol)
    lc = rep.new("ell_limit", tol=sc.claim_tol)
    ones = rep.new("weak_star_one", mode="identity", tol=cfg.resid_tol)
    weak = {}
    for k in (1, 2):
        for name, _, _ in WEAK_TESTS:
            weak[(k, name)] = rep.new(f"weak_star_q{k}_{name}", tol=sc.claim_tol)
    avg = {name: v(ctx) for name, _, v in WEAK_TESTS}
    for n in sc.n_list:
        try:
            S = _hp_escalated(rep, pair, n, cfg, "A")
            SB = _hp_escalated(rep, pair, n, cfg, "B")
        except PrecisionError as exc:
            rep.diagnostics["stopped"] = f"n={n}: {exc}"
            break
        r1 = S.varying_rule(1)
        hc.add(n, max(abs(abs(v) - h(x)) for v, x in zip(S.h_nodes, r1.nodes)))
        rb = SB.mirror.varying_rule(1)
        lc.add(n, max(abs(abs(v) - ell(x)) for v, x in zip(SB.ell_nodes, rb.nodes)))
        one = ctx.zero
        for k, iv in ((1, i1), (2, i2)):
            rule = S.varying_rule(k)
            rc = mp_context(rule.bits)
            m, r = iv.center_radius(rc)
            one = max(one, abs(rc.fsum(rule.weights) - 1))
            for name, g, _ in WEAK_TESTS:
                val = rc.fdot(rule.weights, [g((x - m) / r) for x in rule.nodes])
                weak[(k, name)].add(n, abs(val - avg[name]))
        ones.add(n, one)
    return rep


# ---------------------------------------------------------------------------
# bundled scenarios and suites


@lru_cache(maxsize=None)
def symmetric_pair() -> MeasurePair:
    """Lebesgue measures on [-2, -1] and [1, 2]; one shared object so caches hit."""
    return MeasurePair(lebesgue(Interval(-2, -1)), lebesgue(Interval(1, 2)))


@lru_cache(maxsize=None)
def chebyshev_pair() -> MeasurePair:
    return MeasurePair(chebyshev(Interval(-2, -1)), chebyshev(Interval(1, 2)))


def bundled_suites(cfg: PrecisionConfig | None = None, n_override: int | None = None) -> dict:
    """name -> list of (verify function, Scenario)."""
    cfg = cfg or PrecisionConfig()
    ctx = cfg.ctx

    def ns(default):
        if n_override is None:
            return default
        return tuple(n for n in default if n < n_override) + (n_override,)

    std = Interval(-1, 1)
    szego_probes = {"omega": (ctx.mpf(2), ctx.mpc(1, 1), ctx.mpf(-3))}
    pair = symmetric_pair()
    cheb_pair = chebyshev_pair()
    return {
        "classical-szego": [(verify_varying, Scenario(
            "classical-szego", "varying", ns((5, 10, 15, 20, 25, 30)), cfg, measure=chebyshev(std), probes=szego_probes))],
        "varying-power": [
            (verify_varying, Scenario("varying-power", "varying", ns((6, 12, 18, 24, 30)), cfg,
                                      measure=lebesgue(std), family="power", t0=3)),
            (verify_varying, Scenario("varying-power-chebyshev", "varying", ns((6, 12, 18, 24, 30)), cfg,
                                      measure=chebyshev(std), family="power", t0=3)),
        ],
        "cor-a": [
            (verify_varying, Scenario("cor-a", "varying", ns((6, 12, 18, 24, 30)), cfg,
                                      measure=lebesgue(std), family="cor_a")),
            (verify_varying, Scenario("cor-a-chebyshev", "varying", ns((6, 12, 18, 24, 30)), cfg,
                                      measure=chebyshev(std), family="cor_a")),
        ],
        "pade": [
            (verify_pade, Scenario("pade-chebyshev", "pade", ns((6, 12, 18, 24)), cfg, measure=chebyshev(std))),
            (verify_pade, Scenario("pade-power", "pade", ns((6, 12, 18, 24, 30)), cfg, measure=lebesgue(std),
                                   family="power", t0=3)),
            (verify_pade, Scenario("pade-power-chebyshev", "pade", ns((6, 12, 18, 24, 30)), cfg,
                                   measure=chebyshev(std), family="power", t0=3)),
        ],
        "biortho-symmetric": [(verify_biortho, Scenario(
            "biortho-symmetric", "biortho", ns((4, 8, 12, 16, 20, 24)), cfg, pair=pair, symmetric=True))],
        "biortho-jacobi": [(verify_biortho, Scenario(
            "biortho-jacobi", "biortho", ns((4, 8, 12, 16)), cfg, pair=cheb_pair, symmetric=True))],
        "fixed-point": [
            (verify_fixed_point, Scenario("fixed-point", "fixed_point", ns((4, 8, 12, 16, 20)), cfg,
                                          pair=pair, symmetric=True)),
            (verify_fixed_point, Scenario("fixed-point-chebyshev", "fixed_point", ns((4, 8, 12, 16, 20)), cfg,
                                          pair=cheb_pair, symmetric=True)),
        ],
        "crosschecks": [(verify_crosschecks, Scenario(
            "crosschecks", "crosschecks", ns((4, 8, 12, 16, 20, 24)), cfg, pair=pair, symmetric=True))],
    }


def run_suite(name: str, cfg: PrecisionConfig | None = None, n_override: int | None = None) -> list:
    suites = bundled_suites(cfg, n_override)
    if name not in suites:
        raise DomainError(f"unknown suite {name!r}; known: {', '.join(sorted(suites))}")
    return [fn(sc) for fn, sc in suites[name]]
