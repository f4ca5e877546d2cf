from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbop import DomainError, Interval, PrecisionConfig
from cbop.errors import NumericalError
from cbop.numkit import (
    cheb_coeffs,
    cheb_grid,
    clenshaw,
    gauss_jacobi,
    lu_solve,
    quad_eta,
    quad_lebesgue,
    render,
)


def test_tolerances_follow_bits():
    c = PrecisionConfig(256)
    assert c.fp_tol == c.ctx.ldexp(1, -64)
    assert c.resid_tol == c.ctx.ldexp(1, -128)
    assert c.equil_tol == 1000 * c.fp_tol
    assert c.with_bits(512).fp_tol == c.ctx.ldexp(1, -128)


def test_with_bits_keeps_explicit_tolerance():
    c = PrecisionConfig(128, fp_tol="1e-10")
    assert c.with_bits(256).fp_tol == c.fp_tol


@pytest.mark.parametrize("bad", [dict(mantissa_bits=32), dict(quad_order=4), dict(max_iter=0)])
def test_config_bounds(bad):
    with pytest.raises(ValueError):
        PrecisionConfig(**bad)


def test_interval_exact_and_validated():
    iv = Interval("0.1", "1/3")
    assert iv.a == Fraction(1, 10) and iv.b == Fraction(1, 3)
    with pytest.raises(DomainError):
        Interval(2, 1)
    assert Interval(-2, -1).mirror() == Interval(1, 2)
    assert Interval(-2, -1).disjoint(Interval(1, 2))
    assert not Interval(0, 2).disjoint(Interval(1, 3))


@pytest.mark.parametrize("alpha,beta", [(0, 0), (Fraction(-1, 2), Fraction(-1, 2)), (Fraction(1, 2), 0), (2, 1)])
def test_gauss_jacobi_moments(small, alpha, beta):
    ctx = small.ctx
    rule = gauss_jacobi(Interval(-1, 1), alpha, beta, small, 20)
    a, b = (ctx.mpf(Fraction(v).numerator) / Fraction(v).denominator for v in (alpha, beta))
    for k in range(0, 12):
        # x^k = sum_j C(k,j) (1+x)^j (-1)^(k-j), then Beta integrals
        exact = ctx.fsum(ctx.binomial(k, j) * (-1) ** (k - j) * 2 ** (a + b + j + 1) * ctx.beta(a + 1, b + j + 1)
                         for j in range(k + 1))
        assert abs(rule.apply(lambda x: x**k) - exact) < ctx.mpf(10) ** -25 * max(1, abs(exact))


def test_quad_eta_arcsine_moments(small):
    ctx = small.ctx
    g = cheb_grid(Interval(1, 3), small)
    assert abs(quad_eta(lambda x: 1, g) - ctx.pi) < small.resid_tol
    # mean of the arcsine law is the midpoint
    assert abs(quad_eta(lambda x: x, g) / ctx.pi - 2) < small.resid_tol


def test_quad_lebesgue_rejects_nonfinite(small):
    with pytest.raises(NumericalError):
        quad_lebesgue(lambda x: small.ctx.inf, Interval(0, 1), small)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=8))
def test_chebyshev_interpolation_reproduces_polynomials(coeffs):
    cfg = PrecisionConfig(128, 32)
    ctx = cfg.ctx
    g = cheb_grid(Interval(-1, 1), cfg)
    vals = [clenshaw([ctx.mpf(c) for c in coeffs], s, ctx) for s in g.s]
    back = cheb_coeffs(vals, cfg.mantissa_bits)
    for k, c in enumerate(coeffs):
        assert abs(back[k] - c) < ctx.mpf(10) ** -30 * (1 + abs(c))
    assert all(abs(v) < ctx.mpf(10) ** -30 for v in back[len(coeffs):])


def test_lu_solve_and_singular(small):
    ctx = small.ctx
    A = [[ctx.mpf(2), ctx.mpf(1)], [ctx.mpf(1), ctx.mpf(3)]]
    x = lu_solve(ctx, A, [ctx.mpf(3), ctx.mpf(4)])
    assert abs(x[0] - 1) < small.resid_tol and abs(x[1] - 1) < small.resid_tol
    with pytest.raises(NumericalError):
        lu_solve(ctx, [[ctx.one, ctx.one], [ctx.one, ctx.one]], [ctx.one, ctx.one])


def test_render_is_plain_and_stable(small):
    ctx = small.ctx
    doc = {"x": ctx.pi, "n": 3, "f": Fraction(1, 3), "z": ctx.mpc(1, -2), "ok": True, "none": None}
    a = render(doc, 20)
    assert a == render(doc, 20)
    assert a["n"] == 3 and a["f"] == "1/3" and a["ok"] is True and a["none"] is None
    assert a["x"].startswith("3.14159265358979323")
    assert set(a["z"]) == {"re", "im"}
