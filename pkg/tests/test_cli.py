import argparse
import json

import pytest

from cbop import ConfigError
from cbop.cli import build_parser, main, parse_config, parse_measure, resolve, write_atomic

FAST = ["--bits", "128", "--quad-order", "64"]

GOOD = """\
# a comment
[precision]
bits = 128
quad_order = 64   # trailing comment

[measures]
sigma1 = lebesgue -2 -1
sigma2 = custom 1 2 expr="1 + x^2 # not a comment"

[run]
n_list = 4 8 12
t0 = 5/2
"""


def test_parse_good_config():
    rc = parse_config(GOOD)
    assert (rc.bits, rc.quad_order, rc.n_list) == (128, 64, (4, 8, 12))
    assert rc.sigma2.interval == parse_measure("lebesgue 1 2").interval
    assert str(rc.t0) == "5/2"


@pytest.mark.parametrize("text,line,col", [
    ("[precision]\nbits = lots\n", 2, 8),
    ("[precision]\nbits = 128\nbits = 256\n", 3, 1),
    ("[run]\nspeed = 3\n", 2, 1),
    ("[nowhere]\n", 1, 2),
    ("bits = 1\n", 1, 1),
    ("[measures]\nsigma1 = lebesgue 2 -1\n", 2, 19),
    ("[measures]\n  sigma1 = weird -1 1\n", 2, 12),
    ("[precision]\nbits = 12\n", 2, 8),
])
def test_config_errors_carry_position(text, line, col):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_precedence(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("[precision]\nbits = 128\nquad_order = 64\n[run]\nout = from-file\nn = 3\n")
    args = build_parser().parse_args(["equilibrium", "--config", str(path), "--n", "7"])
    rc = resolve(args, {"CBOP_BITS": "192", "CBOP_N": "5", "CBOP_OUT": "from-env"})
    assert rc.n == 7 and rc.bits == 192 and rc.out == "from-env" and rc.quad_order == 64
    rc = resolve(argparse.Namespace(config=None, out=None, suite=None, n=None, bits=None, quad_order=None),
                 {"CBOP_CONFIG": str(path)})
    assert rc.out == "from-file" and rc.n == 3


def test_write_atomic_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "x.json"
    write_atomic(target, "one\n")
    write_atomic(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in target.parent.iterdir()] == ["x.json"]


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("[measures]\nsigma1 = lebesgue 0 2\nsigma2 = lebesgue 1 3\n")
    assert main(["equilibrium", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "not disjoint" in capsys.readouterr().err
    assert main(["verify", "--suite", "nope", "--out", str(tmp_path / "o")] + FAST) == 2


def test_equilibrium_is_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["equilibrium", "--out", str(a)] + FAST) == 0
    assert main(["equilibrium", "--out", str(b)] + FAST) == 0
    for name in ("equilibrium.json", "equilibrium.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    doc = json.loads((a / "equilibrium.json").read_text())
    assert doc["passed"] is True and doc["mantissa_bits"] == 128


@pytest.mark.parametrize("what", ["biortho", "hp", "szego", "pade"])
def test_compute_commands(tmp_path, what):
    assert main(["compute", what, "--n", "3", "--out", str(tmp_path)] + FAST) == 0
    doc = json.loads((tmp_path / f"{what}.json").read_text())
    assert doc


def test_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", "--suite", "classical-szego", "--n", "15", "--out", str(tmp_path / "ok")] + FAST) == 0
    summary = json.loads((tmp_path / "ok" / "summary.json").read_text())
    assert summary["results"][0]["passed"] is True
    # the Lebesgue weight converges like 1/n, so its claims fail at 1e-3
    code = main(["verify", "--suite", "varying-power", "--n", "12", "--out", str(tmp_path / "bad")] + FAST)
    assert code == 4
    assert "varying-power:" in capsys.readouterr().err
