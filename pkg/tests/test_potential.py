import pytest

from cbop import DomainError, Interval
from cbop.potential import (
    PointMass,
    balayage_onto,
    balayage_point,
    chebyshev_density,
    comparison_functions,
    log_potential,
    vector_equilibrium,
    weighted_equilibrium,
)


def test_arcsine_potential_is_constant(small):
    ctx = small.ctx
    w = chebyshev_density(Interval(-1, 1), small)
    assert abs(w.mass - 1) < small.resid_tol
    for x in ("-0.9", "0", "0.37"):
        assert abs(log_potential(w, ctx.mpf(x)) - ctx.ln(2)) < small.resid_tol
    # off the interval the potential drops below the Robin value
    assert log_potential(w, 5) < ctx.ln(2)


def test_point_balayage(small):
    ctx = small.ctx
    iv = Interval(-1, 1)
    t = ctx.mpf(3)
    b = balayage_point(t, iv, small)
    assert abs(b.mass - 1) < small.fp_tol
    diffs = [log_potential(b, x) + ctx.ln(abs(x - t)) for x in (ctx.mpf("-0.8"), ctx.mpf("0.1"), ctx.mpf("0.95"))]
    assert max(diffs) - min(diffs) < small.fp_tol
    with pytest.raises(DomainError):
        balayage_point(0, iv, small)


def test_interval_balayage_keeps_mass(small):
    src = chebyshev_density(Interval(3, 4), small)
    b = balayage_onto(src, Interval(-1, 1), small)
    assert abs(b.mass - 1) < small.fp_tol
    assert all(v > 0 for v in b.values)


def test_weighted_equilibrium_mass(small):
    eq = weighted_equilibrium(Interval(-1, 1), PointMass(3), small)
    assert abs(eq.lam.mass - 1) < small.fp_tol
    assert eq.residual < small.equil_tol


def test_vector_equilibrium_symmetric(small, pair):
    eq = vector_equilibrium(*pair.intervals, small)
    assert abs(eq.lambda1.mass - 1) < small.equil_tol
    assert abs(eq.lambda2.mass - 1) < small.equil_tol
    assert abs(eq.gamma1 - eq.gamma2) < small.fp_tol
    c1, c2 = comparison_functions(eq)
    z = small.ctx.mpf(10) ** 6
    # Φ(z) ~ z at infinity
    assert abs(c1.phi(z) / z - 1) < 1e-5 and abs(c2.phi(z) / z - 1) < 1e-5


def test_vector_equilibrium_rejects_overlap(small):
    with pytest.raises(DomainError):
        vector_equilibrium(Interval(0, 2), Interval(1, 3), small)
