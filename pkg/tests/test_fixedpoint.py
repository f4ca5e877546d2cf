import json
import math
import random

import pytest

from cbop import DomainError, PrecisionConfig
from cbop.fixedpoint import (
    boundary_pair,
    constant_pair,
    contraction_audit,
    fixed_point_G,
    make_T,
    metric_d,
    random_pair,
)


@pytest.fixture(scope="module")
def gp(small, pair):
    return fixed_point_G(pair, None, small)


def test_contraction(small, pair):
    audit = contraction_audit(pair, small, count=6)
    assert audit["max_ratio"] <= 0.51
    assert abs(audit["constant_ratio"] - small.ctx.mpf(0.5)) < small.fp_tol


def test_scaling_law(small, pair):
    ctx = small.ctx
    T = make_T(pair, small)
    p = random_pair(pair, small, random.Random(3))
    c = ctx.mpf(7)
    shifted = T(p.scaled(1, c))
    base = T(p)
    # g2 -> c g2 moves g1* by c^(1/2)
    assert max(abs(a - b - ctx.ln(c) / 2) for a, b in zip(shifted.chi1, base.chi1)) < small.resid_tol * 100
    assert max(abs(a - b) for a, b in zip(shifted.chi2, base.chi2)) < small.resid_tol * 100


def test_fixed_point(small, gp):
    assert gp.residual < 10 * small.fp_tol
    assert gp.sweeps <= math.log2(1 / small.fp_tol) + 5
    assert gp.trace[-1] < small.fp_tol


def test_to_plain_round_trips_through_json(small, gp):
    probes = {"omega": [3, small.ctx.mpc(0, 1), -1.5]}
    doc = gp.to_plain(probes)
    text = json.dumps(doc, sort_keys=True)
    assert text == json.dumps(gp.to_plain(probes), sort_keys=True)
    rows = doc["probes"]["omega"]
    assert "G1" not in rows[2] and "G2" in rows[2]  # -1.5 lies on Δ1
    assert doc["sweeps"] == gp.sweeps and len(doc["g1_table"]["nodes"]) == small.quad_order


def test_bad_inputs(small, pair):
    with pytest.raises(DomainError):
        fixed_point_G(pair, None, small, side="C")
    with pytest.raises(DomainError):
        boundary_pair(pair, lambda x: -x, lambda x: 1, small)
    other = constant_pair(pair, 1, 1, PrecisionConfig(128, 64))
    with pytest.raises(DomainError):
        metric_d(constant_pair(pair, 1, 1, small), other)
