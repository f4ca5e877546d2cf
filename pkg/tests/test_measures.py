import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbop import ConfigError, DomainError, Interval, MeasurePair, SzegoConditionError
from cbop.measures import Expr, chebyshev, custom, jacobi, lebesgue, markov_transform, nikishin, szego_condition_value


def test_expression_grammar(small):
    ctx = small.ctx
    e = Expr("2*sqrt(x^2 + 1) - exp(ln(abs(x))) / pi")
    x = ctx.mpf("0.3")
    assert abs(e(x, ctx) - (2 * ctx.sqrt(x * x + 1) - x / ctx.pi)) < small.resid_tol


@pytest.mark.parametrize("text", ["__import__('os')", "x.real", "open('f')", "lambda: 1", "[x]", "x if x else 1", "y + 1"])
def test_expression_rejects_code(text):
    with pytest.raises(ConfigError):
        Expr(text)


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="x0123456789.+-*/^()abcdefghijklmnopqrstuvwyz_ '", max_size=20))
def test_expression_never_runs_foreign_names(text):
    # anything that parses may only mention x, pi, e and the four functions
    try:
        e = Expr(text)
    except ConfigError:
        return
    allowed = {"x", "pi", "e", "sqrt", "exp", "ln", "abs"}
    import ast

    names = {n.id for n in ast.walk(ast.parse(e.text.replace("^", "**"), mode="eval")) if isinstance(n, ast.Name)}
    assert names <= allowed


def test_chebyshev_markov_transform(small):
    ctx = small.ctx
    m = chebyshev(Interval(-1, 1))
    for z in (ctx.mpf(2), ctx.mpc(0.5, 1), ctx.mpf(-3)):
        exact = 1 / (ctx.sqrt(z - 1) * ctx.sqrt(z + 1))
        assert abs(markov_transform(m, z, small) - exact) < small.resid_tol
    with pytest.raises(DomainError):
        markov_transform(m, 0, small)


def test_masses(small):
    ctx = small.ctx
    assert abs(chebyshev(Interval(3, 7)).mass(small) - 1) < small.resid_tol
    assert abs(lebesgue(Interval(1, 4)).mass(small) - 3) < small.resid_tol
    # (1-x)^(1/2) on [-1, 1] integrates to (2/3) 2^(3/2)
    assert abs(jacobi(Interval(-1, 1), "1/2", 0).mass(small) - ctx.mpf(2) / 3 * 2 ** ctx.mpf(1.5)) < small.resid_tol


def test_mirror_swaps_exponents():
    m = jacobi(Interval(1, 2), "1/2", "-1/3")
    r = m.mirror()
    assert r.interval == Interval(-2, -1)
    assert (r.alpha, r.beta) == (m.beta, m.alpha)


def test_custom_mirror_density(small):
    ctx = small.ctx
    m = custom(Interval(1, 2), "1 + x")
    r = m.mirror()
    x = ctx.mpf("1.25")
    assert abs(r.density(-x, ctx) - m.density(x, ctx)) < small.resid_tol


def test_nonpositive_density_rejected(small):
    with pytest.raises(SzegoConditionError):
        custom(Interval(-1, 1), "x").rule(small)


def test_jacobi_exponent_bounds():
    with pytest.raises(DomainError):
        jacobi(Interval(0, 1), -1, 0)


def test_pair_needs_disjoint_intervals():
    with pytest.raises(DomainError):
        MeasurePair(lebesgue(Interval(0, 2)), lebesgue(Interval(1, 3)))


def test_nikishin_densities_keep_sign(small, pair):
    ns = nikishin(pair, small)
    assert all(w < 0 for w in ns.s12_rule().weights)  # σ̂2 < 0 left of Δ2
    assert all(w > 0 for w in ns.s21_rule().weights)


def test_szego_condition_chebyshev(small):
    ctx = small.ctx
    # ∫ ln(1/(π sqrt(1-x²))) dη = -π ln(π/2)
    v = szego_condition_value(chebyshev(Interval(-1, 1)), small)
    assert abs(v + ctx.pi * ctx.ln(ctx.pi / 2)) < small.resid_tol
