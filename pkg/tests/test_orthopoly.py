import pytest

from cbop import DomainError, Interval
from cbop.measures import chebyshev, lebesgue, markov_transform
from cbop.orthopoly import (
    divided_difference,
    fixed_family,
    gram_solve,
    monic_op,
    multipoint_pade,
    power_family,
    stieltjes_op,
    truncate,
    varying_op,
    weak_star_diag,
)
from cbop.poly import Poly, RootPoly


def test_chebyshev_norms_exact(small):
    ctx = small.ctx
    m = chebyshev(Interval(-1, 1))
    for n in (1, 5, 12):
        op = monic_op(m, m.interval, n, small)
        assert abs(op.tau - ctx.sqrt(2) * ctx.ldexp(1, n - 1)) < small.resid_tol * op.tau
        # Q_n = T_n / 2^(n-1)
        assert abs(op.Q.coeffs[n] - ctx.ldexp(1, 1 - n)) < small.resid_tol
        assert all(abs(c) < small.resid_tol for c in op.Q.coeffs[:n])


def test_legendre_norm(small):
    ctx = small.ctx
    n = 9
    op = monic_op(lebesgue(Interval(-1, 1)), Interval(-1, 1), n, small)
    lead = ctx.factorial(2 * n) / (ctx.ldexp(1, n) * ctx.factorial(n) ** 2)
    norm2 = 2 / ((2 * n + 1) * lead**2)
    assert abs(op.tau ** -2 / norm2 - 1) < small.resid_tol


def test_gram_and_stieltjes_agree(small):
    w = lambda x: 1 + x * x
    iv = Interval(0, 2)
    a = monic_op(w, iv, 8, small)
    b = stieltjes_op(w, iv, 8, small)
    assert max(abs(x - y) for x, y in zip(a.Q.coeffs, b.Q.coeffs)) < small.fp_tol
    assert a.residual < small.resid_tol


def test_degree_cap(small):
    rule = chebyshev(Interval(-1, 1)).rule(small, 20)
    with pytest.raises(DomainError):
        gram_solve(rule, Interval(-1, 1), 10, small)


def test_zero_degree(small):
    ctx = small.ctx
    op = monic_op(lebesgue(Interval(0, 4)), Interval(0, 4), 0, small)
    assert op.Q(ctx.mpf(1)) == 1 and abs(op.tau - 1 / ctx.sqrt(4)) < small.resid_tol


def test_divided_difference(small):
    ctx = small.ctx
    iv = Interval(-1, 1)
    p = Poly(iv, (ctx.mpf(1), ctx.mpf(-2), ctx.mpf(3), ctx.mpf("0.5")), small.mantissa_bits)
    rule = lebesgue(iv).rule(small)
    d = divided_difference(p, rule)
    z = ctx.mpf("0.3")
    direct = ctx.fdot(rule.weights, [(p(z) - p(x)) / (z - x) for x in rule.nodes])
    assert abs(d(z) - direct) < small.resid_tol


def test_truncate(small):
    ctx = small.ctx
    p = Poly(Interval(-1, 1), (ctx.one, ctx.one, ctx.mpf(10) ** -30), small.mantissa_bits)
    q, tail = truncate(p, 1)
    assert q.degree == 1 and tail < ctx.mpf(10) ** -29


def test_pade_remainder_routes(small):
    ctx = small.ctx
    m = lebesgue(Interval(-1, 1))
    w = RootPoly((ctx.mpf(3),) * 4, ctx.one, small.mantissa_bits)
    R = multipoint_pade(m, w, 3, small)
    for z in (ctx.mpf(2), ctx.mpc(0, 2)):
        assert abs(R.remainder(z) - R.remainder_direct(z, small)) < small.fp_tol
    # interpolation at the zeros of w_2n
    assert abs(R.R(3) - markov_transform(m, 3, small)) < small.fp_tol
    with pytest.raises(DomainError):
        multipoint_pade(m, RootPoly((ctx.zero,), ctx.one, small.mantissa_bits), 3, small)


def test_varying_family_residual_and_weak_star(small):
    iv = Interval(-1, 1)
    seq = power_family(iv, 3, small, lebesgue(iv))
    op = varying_op(seq, 10, small)
    assert op.residual < small.resid_tol
    one = weak_star_diag(seq, lambda x: 1, 10, small, op)
    assert abs(one - 1) < small.resid_tol
    assert seq.condition_iv(10, small) < small.resid_tol


def test_fixed_family_is_plain_orthogonality(small):
    m = chebyshev(Interval(-1, 1))
    a = varying_op(fixed_family(m, small), 6, small)
    b = monic_op(m, m.interval, 6, small)
    assert max(abs(x - y) for x, y in zip(a.Q.coeffs, b.Q.coeffs)) < small.resid_tol
