import pytest

from cbop import DomainError, PrecisionConfig
from cbop.biortho import (
    biorthogonal_pair,
    cauchy_gram,
    hp_fixed_point_route,
    hp_system,
    hp_system_b,
    pairing_matrix,
    tilde_T_n,
)


def _coeff_gap(p, q):
    scale = max(abs(c) for c in q.coeffs)
    return max(abs(a - b) for a, b in zip(p.coeffs, q.coeffs)) / scale


def test_degree_zero(small, pair):
    ctx = small.ctx
    B = biorthogonal_pair(pair, 0, small)
    assert B.P.degree == 0 and B.Q.degree == 0
    r1, r2 = pair.sigma1.rule(small), pair.sigma2.rule(small)
    direct = ctx.fsum(u * v / (x - y) for u, x in zip(r1.weights, r1.nodes) for v, y in zip(r2.weights, r2.nodes))
    assert abs(B.C / direct - 1) < small.resid_tol
    S = hp_system(pair, 0, small)
    assert S.a2.coeffs[0] == 1 and S.a0.coeffs[0] == 0


def test_biorthogonality_and_recompute(small, pair):
    B = biorthogonal_pair(pair, 6, small)
    assert B.residual < small.resid_tol
    M = pairing_matrix(B.Ps, B.Qs, pair, PrecisionConfig(128, 128))
    ctx = small.ctx
    off = max(abs(M[m][k]) / ctx.sqrt(abs(M[m][m] * M[k][k])) for m in range(7) for k in range(7) if m != k)
    assert off < small.fp_tol


def test_size_cap(small, pair):
    with pytest.raises(DomainError):
        cauchy_gram(pair, 200, small)


@pytest.mark.parametrize("n", [1, 4, 7])
def test_two_routes_agree(small, pair, n):
    B = biorthogonal_pair(pair, n, small)
    assert _coeff_gap(hp_system(pair, n, small).a2, B.Qs[n]) < small.fp_tol
    assert _coeff_gap(hp_system_b(pair, n, small).b2, B.Ps[n]) < small.fp_tol


def test_linear_forms_match_integrals(small, pair):
    ctx = small.ctx
    S = hp_system(pair, 5, small)
    for z in (ctx.mpc(0, 1), ctx.mpf(4)):
        A0, A1 = S.linear_forms(z)
        assert abs(A1 - S.A1(z)) < small.fp_tol * max(1, abs(A1))
        assert abs(A0 - S.A0(z)) < small.fp_tol * max(1, abs(A0))


def test_varying_rules_have_unit_mass(small, pair):
    S = hp_system(pair, 6, small)
    for k in (1, 2):
        assert abs(small.ctx.fsum(S.varying_rule(k).weights) - 1) < small.resid_tol
    assert S.h_sign != 0
    with pytest.raises(DomainError):
        S.varying_rule(3)


def test_mirror_symmetry(small, pair):
    ctx = small.ctx
    n = 5
    S, Sb = hp_system(pair, n, small), hp_system_b(pair, n, small)
    for z in (ctx.mpc(0.5, 1), ctx.mpf(3)):
        assert abs(Sb.P2(z) - (-1) ** n * S.Q2(-z)) < small.fp_tol * abs(S.Q2(-z))


def test_tilde_T_fixes_the_system(small, pair):
    S = hp_system(pair, 4, small)
    Q1, Q2 = tilde_T_n(S.Q1, S.Q2, None, pair, 4, small, h_nodes=[abs(h) for h in S.h_nodes])
    assert _coeff_gap(Q2, S.Q2) < small.fp_tol
    assert _coeff_gap(Q1, S.Q1) < small.fp_tol


def test_fixed_point_route(small, pair):
    S = hp_system(pair, 3, small)
    F = hp_fixed_point_route(pair, 3, small)
    assert _coeff_gap(F.Q2, S.Q2) < small.fp_tol
    assert len(F.residuals["fixed_point_trace"]) < small.max_iter
