import json

import pytest

from cbop import DomainError, Interval
from cbop.harness import Claim, ConvergenceReport, Scenario, run_suite
from cbop.measures import lebesgue


def test_limit_claim_needs_tolerance_and_trend():
    c = Claim("x", tol=1e-3)
    for n, e in ((4, 1e-2), (8, 1e-3), (12, 5e-4), (16, 1e-4)):
        c.add(n, e)
    assert c.passed(1e-20)
    c.add(20, 2e-4)  # goes back up
    assert not c.passed(1e-20)
    # noise below the floor does not count as a broken trend
    d = Claim("y")
    for n, e in ((4, 1e-30), (8, 3e-30), (12, 2e-30)):
        d.add(n, e)
    assert d.passed(1e-25) and not d.passed(1e-31)


def test_identity_claim_checks_every_entry():
    c = Claim("id", mode="identity", tol=1e-10)
    c.add(1, 1e-12)
    c.add(2, 1e-9)
    c.add(3, 1e-13)
    assert not c.passed(0)
    assert not Claim("empty").passed(0)


def test_rate_of_geometric_sequence():
    c = Claim("g")
    for n in range(2, 20, 2):
        c.add(n, 0.5**n)
    assert abs(c.rate() - 0.5) < 1e-12


def test_informational_claims_do_not_gate(small):
    r = ConvergenceReport("s", "sc", small.mantissa_bits)
    r.new("info", informational=True).add(1, 1.0)
    ok = r.new("ok", mode="identity")
    ok.add(1, 0.0)
    assert r.passed and r.failing() == []
    with pytest.raises(KeyError):
        r.claim("missing")


def test_scenario_validation(small):
    m = lebesgue(Interval(-1, 1))
    with pytest.raises(DomainError):
        Scenario("bad-n", "varying", (4, 4), small, measure=m)
    with pytest.raises(DomainError):
        Scenario("near", "varying", (4,), small, measure=m, probes={"omega": (small.ctx.mpf("1.1"),)})
    with pytest.raises(DomainError):
        Scenario("none", "varying", (4,), small)
    sc = Scenario("ok", "varying", (4, 8), small, measure=m)
    assert sc.probes["omega"]


def test_small_classical_suite(small):
    (rep,) = run_suite("classical-szego", small, 15)
    assert [c.ns for c in rep.claims][0] == [5, 10, 15]
    assert rep.passed, rep.failing()
    again = run_suite("classical-szego", small, 15)[0]
    assert rep.to_json() == again.to_json() and rep.to_csv() == again.to_csv()
    doc = json.loads(rep.to_json())
    assert doc["mantissa_bits"] == small.mantissa_bits
    assert rep.to_csv().splitlines()[0] == "scenario,claim,n,error"


def test_unknown_suite(small):
    with pytest.raises(DomainError):
        run_suite("nope", small)
