import pytest

from cbop import DomainError, Interval
from cbop.measures import chebyshev, custom, jacobi, lebesgue
from cbop.poly import RootPoly
from cbop.szego import (
    BlaschkeProduct,
    blaschke_eval,
    exterior_probes,
    outer_identity_check,
    psi_map,
    szego_direct,
    szego_from_h,
    szego_from_measure,
)


def test_chebyshev_gives_sqrt_pi(small):
    ctx = small.ctx
    G = szego_from_measure(chebyshev(Interval(-1, 1)), small)
    for z in (2, ctx.mpc(1, 1), -3):
        assert abs(G(z) - ctx.sqrt(ctx.pi)) < small.resid_tol
    assert abs(G.value_at_inf - ctx.sqrt(ctx.pi)) < small.resid_tol


def test_boundary_law(small):
    ctx = small.ctx
    m = custom(Interval(1, 3), "2 + x^2")
    G = szego_from_measure(m, small)
    for x in ("1.1", "2", "2.9"):
        x = ctx.mpf(x)
        h = ctx.sqrt((3 - x) * (x - 1)) * m.density(x, ctx)
        assert abs(abs(G.boundary(x)) ** 2 * h - 1) < ctx.mpf(10) ** -25


def test_series_route_matches_cauchy_integral(small):
    ctx = small.ctx
    iv = Interval(-1, 2)
    ln_h = lambda x: ctx.ln(3 + ctx.sin(x))
    G = szego_from_h(iv, ln_h, small)
    for z in exterior_probes(iv, small, 5):
        assert abs(G(z) / szego_direct(iv, ln_h, z, small) - 1) < ctx.mpf(10) ** -25


def test_scaling_and_product(small):
    ctx = small.ctx
    iv = Interval(0, 1)
    A = szego_from_h(iv, lambda x: ctx.ln(1 + x), small)
    B = szego_from_h(iv, lambda x: ctx.ln(2 + x * x), small)
    AB = szego_from_h(iv, lambda x: ctx.ln((1 + x) * (2 + x * x)), small)
    c = ctx.mpf(5)
    cA = szego_from_h(iv, lambda x: ctx.ln(c * (1 + x)), small)
    z = ctx.mpc(0.3, 0.7)
    assert abs((A * B)(z) / AB(z) - 1) < small.resid_tol
    assert abs(cA(z) / A(z) - c ** ctx.mpf(-0.5)) < small.resid_tol
    assert abs(A.power(3)(z) / A(z) ** 3 - 1) < small.resid_tol


def test_jacobi_endpoint_exponents(small):
    # (1-x)^(-1/2)(1+x)^(-1/2)/π is the Chebyshev measure written as Jacobi
    G = szego_from_measure(jacobi(Interval(-1, 1), "-1/2", "-1/2"), small)
    assert abs(G(2) - 1) < small.resid_tol  # h ≡ 1 here


def test_real_value_off_interval(small):
    ctx = small.ctx
    G = szego_from_measure(lebesgue(Interval(-1, 1)), small)
    v = G(ctx.mpf(3))
    assert isinstance(v, ctx.mpf) or abs(ctx.im(v)) < small.resid_tol


def test_psi_and_blaschke(small):
    ctx = small.ctx
    iv = Interval(-1, 1)
    z = ctx.mpc(0.2, 0.9)
    assert abs(psi_map(iv, z, small)) > 1
    B = BlaschkeProduct(iv, (ctx.mpf(3), None))
    assert abs(blaschke_eval(B, z, small)) < 1
    assert abs(blaschke_eval(B, 3, small)) < small.resid_tol
    with pytest.raises(DomainError):
        psi_map(iv, 0, small)


def test_outer_identity_residual(small):
    ctx = small.ctx
    w = RootPoly((ctx.mpf(3),) * 6, ctx.one, small.mantissa_bits)
    out = outer_identity_check(w, None, Interval(-1, 1), small, n=3)
    assert out["eq_c"] < small.fp_tol and out["degree"] == 6
