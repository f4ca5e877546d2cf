"""Command-line front end.

    cbop equilibrium [--config PATH] [--out DIR] [--bits B] [--quad-order N]
    cbop compute {biortho,hp,szego,pade} [--n N] [--measure DESC] ...
    cbop verify [--suite NAME|all] [--n N] ...

Settings come from three places; a flag beats an environment variable,
which beats the config file.  The variables are CBOP_CONFIG, CBOP_OUT,
CBOP_SUITE, CBOP_N, CBOP_BITS and CBOP_QUAD_ORDER.

Config file grammar (line oriented, ``#`` starts a comment)::

    [precision]
    bits = 256
    quad_order = 256
    fp_tol = 1e-20          # optional, decimal string read at full precision
    max_iter = 400

    [measures]
    sigma1 = lebesgue -2 -1
    sigma2 = jacobi 1 2 alpha=1/2 beta=0
    mu = custom -1 1 expr="1 + x^2"

    [run]
    n = 5
    n_list = 4 8 12
    suite = classical-szego
    out = results
    t0 = 3

A measure descriptor is ``kind a b [alpha=.. beta=.. expr=..]`` with kind one
of lebesgue, chebyshev, jacobi, custom.  Endpoints are exact decimals or
fractions.

Exit codes: 0 success, 2 bad configuration, 3 convergence or residual
failure, 4 a verification claim failed.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import harness
from .biortho import biorthogonal_pair, hp_system
from .errors import CbopError, ConfigError, ConvergenceError, DomainError, NumericalError
from .measures import Measure, MeasurePair, chebyshev, custom, jacobi, lebesgue
from .numkit import Interval, PrecisionConfig, digits_for, render
from .orthopoly import multipoint_pade
from .poly import RootPoly
from .potential import comparison_functions, vector_equilibrium
from .szego import exterior_probes, szego_from_measure

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_CLAIM = 0, 2, 3, 4

SECTIONS = {
    "precision": {"bits", "quad_order", "fp_tol", "max_iter"},
    "measures": {"sigma1", "sigma2", "mu"},
    "run": {"n", "n_list", "suite", "out", "t0"},
}
ENV = {"config": "CBOP_CONFIG", "out": "CBOP_OUT", "suite": "CBOP_SUITE", "n": "CBOP_N",
       "bits": "CBOP_BITS", "quad_order": "CBOP_QUAD_ORDER"}
MAX_BITS = 4096


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    bits: int = 256
    quad_order: int = 256
    fp_tol: str | None = None
    max_iter: int = 400
    sigma1: Measure | None = None
    sigma2: Measure | None = None
    mu: Measure | None = None
    n: int | None = None
    n_list: tuple | None = None
    suite: str | None = None
    out: str = "cbop-out"
    t0: Fraction | None = None
    origin: dict = field(default_factory=dict)  # key -> (line, column) in the file

    def precision(self) -> PrecisionConfig:
        try:
            return PrecisionConfig(self.bits, self.quad_order, self.fp_tol, self.max_iter)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def pair(self) -> MeasurePair:
        s1 = self.sigma1 or lebesgue(Interval(-2, -1))
        s2 = self.sigma2 or lebesgue(Interval(1, 2))
        if not s1.interval.disjoint(s2.interval):
            line, col = self.origin.get("sigma2", (None, None))
            raise ConfigError(f"intervals {s1.interval} and {s2.interval} are not disjoint", line, col)
        return MeasurePair(s1, s2)


def _int(text: str, line=None, col=None, key="value") -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {text!r}", line, col) from None


def _exact(text: str, line=None, col=None) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected an exact decimal or fraction, got {text!r}", line, col) from None


def parse_measure(text: str, line=None, col=None) -> Measure:
    """Measure from a descriptor ``kind a b [key=value ...]``; a bare kind means [-1, 1]."""
    try:
        parts = shlex.split(text)
    except ValueError as exc:
        raise ConfigError(f"cannot split measure descriptor: {exc}", line, col) from None
    if not parts:
        raise ConfigError("empty measure descriptor", line, col)
    kind, rest = parts[0].lower(), parts[1:]
    pos = [p for p in rest if "=" not in p]
    opts = dict(p.split("=", 1) for p in rest if "=" in p)
    if len(pos) not in (0, 2):
        raise ConfigError(f"measure needs two endpoints, got {len(pos)}", line, col)
    a, b = (_exact(pos[0], line, col), _exact(pos[1], line, col)) if pos else (Fraction(-1), Fraction(1))
    if not a < b:
        c = col + text.find(pos[0]) if col and pos else col
        raise ConfigError(f"malformed interval: a={a} must be below b={b}", line, c)
    unknown = set(opts) - {"alpha", "beta", "expr"}
    if unknown:
        raise ConfigError(f"unknown measure option(s) {', '.join(sorted(unknown))}", line, col)
    iv = Interval(a, b)
    alpha = _exact(opts.get("alpha", "0"), line, col)
    beta = _exact(opts.get("beta", "0"), line, col)
    try:
        if kind == "lebesgue":
            return lebesgue(iv)
        if kind == "chebyshev":
            return chebyshev(iv)
        if kind == "jacobi":
            return jacobi(iv, alpha, beta)
        if kind == "custom":
            if "expr" not in opts:
                raise ConfigError("custom measure needs expr=...", line, col)
            return custom(iv, opts["expr"], alpha, beta)
    except ConfigError as exc:
        if exc.line is None:
            raise ConfigError(str(exc), line, col) from None
        raise
    except DomainError as exc:
        raise ConfigError(str(exc), line, col) from None
    raise ConfigError(f"unknown measure kind {kind!r}", line, col)


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    section = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        s = line.strip()
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError("unterminated section header", lineno, col0)
            section = s[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno, col0 + 1)
            continue
        if "=" not in s:
            raise ConfigError("expected key = value", lineno, col0)
        if section is None:
            raise ConfigError("key outside any section", lineno, col0)
        key, value = (p.strip() for p in s.split("=", 1))
        key = key.lower()
        eq = line.index("=")
        vcol = line.index(value, eq) + 1 if value else eq + 2
        if key not in SECTIONS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, col0)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno, col0)
        seen.add(key)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno, vcol)
        cfg.origin[key] = (lineno, vcol)
        _assign(cfg, key, value, lineno, vcol)
    return cfg


def _strip_comment(raw: str) -> str:
    inside = False
    for i, ch in enumerate(raw):
        if ch == '"':
            inside = not inside
        elif ch == "#" and not inside:
            return raw[:i]
    return raw


def _assign(cfg: RunConfig, key: str, value: str, line=None, col=None):
    if key in ("bits", "quad_order", "max_iter"):
        v = _int(value, line, col, key)
        if key == "bits" and not 64 <= v <= MAX_BITS:
            raise ConfigError(f"bits must lie in [64, {MAX_BITS}], got {v}", line, col)
        if key == "quad_order" and v < 16:
            raise ConfigError(f"quad_order must be at least 16, got {v}", line, col)
        if key == "max_iter" and v < 1:
            raise ConfigError("max_iter must be positive", line, col)
        setattr(cfg, key, v)
    elif key == "fp_tol":
        v = _exact(value, line, col)
        if not v > 0:
            raise ConfigError("fp_tol must be positive", line, col)
        cfg.fp_tol = value
    elif key in ("sigma1", "sigma2", "mu"):
        setattr(cfg, key, parse_measure(value, line, col))
    elif key == "n":
        v = _int(value, line, col, key)
        if v < 0:
            raise ConfigError("n must be nonnegative", line, col)
        cfg.n = v
    elif key == "n_list":
        ns = tuple(_int(t, line, col, key) for t in value.replace(",", " ").split())
        if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 0:
            raise ConfigError("n_list must be increasing nonnegative integers", line, col)
        cfg.n_list = ns
    elif key == "t0":
        cfg.t0 = _exact(value, line, col)
    else:
        setattr(cfg, key, value)


def resolve(args: argparse.Namespace, environ=None) -> RunConfig:
    """Merge file, environment and flags (flags win)."""
    environ = os.environ if environ is None else environ
    path = args.config or environ.get(ENV["config"])
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    for key in ("out", "suite", "n", "bits", "quad_order"):
        flag = getattr(args, key, None)
        if flag is not None:
            _assign(cfg, key, str(flag))
        elif environ.get(ENV[key]):
            _assign(cfg, key, environ[ENV[key]])
    if getattr(args, "measure", None):
        cfg.mu = parse_measure(args.measure)
    return cfg


# ---------------------------------------------------------------------------
# output


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _poly_plain(p) -> dict:
    return {"interval": [str(p.interval.a), str(p.interval.b)], "degree": p.degree,
            "chebyshev_coeffs": list(p.coeffs), "monomial_coeffs": p.to_monomial()}


def _measure_plain(m: Measure) -> dict:
    return m.describe()


# ---------------------------------------------------------------------------
# commands


def cmd_equilibrium(rc: RunConfig) -> int:
    pc = rc.precision()
    pair = rc.pair()
    i1, i2 = pair.intervals
    eq = vector_equilibrium(i1, i2, pc)
    c1, c2 = comparison_functions(eq)
    ok = max(eq.residual1, eq.residual2) < pc.equil_tol
    digits = digits_for(pc.mantissa_bits)
    doc = {
        "mantissa_bits": pc.mantissa_bits,
        "value_digits": digits,
        "measures": [_measure_plain(pair.sigma1), _measure_plain(pair.sigma2)],
        "gamma1": eq.gamma1,
        "gamma2": eq.gamma2,
        "C1": c1.C,
        "C2": c2.C,
        "residual1": eq.residual1,
        "residual2": eq.residual2,
        "equil_tol": pc.equil_tol,
        "sweeps": len(eq.trace),
        "passed": ok,
    }
    out = Path(rc.out)
    n1, n2 = eq.lambda1.grid().nodes, eq.lambda2.grid().nodes
    rows = ["j,x1,lambda1,x2,lambda2"]
    for j, (x1, v1, x2, v2) in enumerate(zip(n1, eq.lambda1.values, n2, eq.lambda2.values)):
        rows.append(",".join([str(j)] + render([x1, v1, x2, v2], digits)))
    write_atomic(out / "equilibrium.json", dump_json(render(doc, digits)))
    write_atomic(out / "equilibrium.csv", "\n".join(rows) + "\n")
    return EXIT_OK if ok else EXIT_CONVERGENCE


def _compute_biortho(rc, pc, n):
    pair = rc.pair()
    B = biorthogonal_pair(pair, n, pc)
    ctx = pc.ctx
    diag = [B.matrix[m][m] for m in range(n + 1)]
    normed = [[B.matrix[m][k] / ctx.sqrt(abs(diag[m] * diag[k])) for k in range(n + 1)] for m in range(n + 1)]
    ok = B.residual < pc.resid_tol
    return {
        "measures": [_measure_plain(pair.sigma1), _measure_plain(pair.sigma2)],
        "n": n, "P": _poly_plain(B.P), "Q": _poly_plain(B.Q), "C": B.C,
        "normalized_matrix": normed, "max_off_diagonal": B.residual, "resid_tol": pc.resid_tol, "passed": ok,
    }, ok


def _compute_hp(rc, pc, n):
    pair = rc.pair()
    S = hp_system(pair, n, pc)
    res = max(S.residuals.values()) if S.residuals else pc.ctx.zero
    ok = res < pc.resid_tol
    return {
        "measures": [_measure_plain(pair.sigma1), _measure_plain(pair.sigma2)],
        "n": n, "a0": _poly_plain(S.a0), "a1": _poly_plain(S.a1), "a2": _poly_plain(S.a2), "Q1": _poly_plain(S.Q1),
        "kappa1": S.kappa1, "kappa2": S.kappa2, "residuals": dict(S.residuals), "resid_tol": pc.resid_tol,
        "passed": ok,
    }, ok


def _compute_szego(rc, pc, n):
    mu = rc.mu or chebyshev(Interval(-1, 1))
    G = szego_from_measure(mu, pc)
    probes = exterior_probes(mu.interval, pc, 8)
    return {
        "measure": _measure_plain(mu),
        "G_inf": G.value_at_inf,
        "probes": [{"z": z, "G": G(z)} for z in probes],
        "log_h_table": list(G.log_data),
        "chebyshev_coeffs": list(G.coeffs),
    }, True


def _compute_pade(rc, pc, n):
    mu = rc.mu or chebyshev(Interval(-1, 1))
    ctx = pc.ctx
    roots = () if rc.t0 is None else (ctx.mpf(rc.t0.numerator) / rc.t0.denominator,) * (2 * n)
    w = RootPoly(roots, ctx.one, pc.mantissa_bits)
    R = multipoint_pade(mu, w, n, pc)
    probes = exterior_probes(mu.interval, pc, 8)
    ok = R.ortho_residual is None or R.ortho_residual < pc.resid_tol
    return {
        "measure": _measure_plain(mu), "n": n, "t0": None if rc.t0 is None else str(rc.t0),
        "numerator": _poly_plain(R.P), "denominator": _poly_plain(R.Q),
        "remainder": [{"z": z, "value": R.remainder(z)} for z in probes],
        "ortho_residual": R.ortho_residual, "tail_residual": R.tail_residual, "resid_tol": pc.resid_tol,
        "passed": ok,
    }, ok


COMPUTE = {"biortho": _compute_biortho, "hp": _compute_hp, "szego": _compute_szego, "pade": _compute_pade}


def cmd_compute(rc: RunConfig, what: str) -> int:
    pc = rc.precision()
    n = 5 if rc.n is None else rc.n
    doc, ok = COMPUTE[what](rc, pc, n)
    digits = digits_for(pc.mantissa_bits)
    doc = {"object": what, "mantissa_bits": pc.mantissa_bits, "value_digits": digits, **doc}
    write_atomic(Path(rc.out) / f"{what}.json", dump_json(render(doc, digits)))
    return EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_verify(rc: RunConfig, err=None) -> int:
    err = err or sys.stderr
    pc = rc.precision()
    name = rc.suite or "classical-szego"
    suites = harness.bundled_suites(pc, rc.n)
    names = sorted(suites) if name == "all" else [name]
    for s in names:
        if s not in suites:
            raise ConfigError(f"unknown suite {s!r}; known: all, {', '.join(sorted(suites))}")
    out = Path(rc.out)
    files, summary, broke, failed = {}, [], False, []
    for s in names:
        for fn, sc in suites[s]:
            try:
                rep = fn(sc)
            except (ConvergenceError, NumericalError) as exc:
                broke = True
                summary.append({"suite": s, "scenario": sc.name, "passed": False, "error": str(exc)})
                continue
            files[f"verify-{sc.name}.json"] = rep.to_json()
            files[f"verify-{sc.name}.csv"] = rep.to_csv()
            summary.append({"suite": s, "scenario": sc.name, "passed": rep.passed, "failing": rep.failing()})
            failed += [f"{sc.name}:{c}" for c in rep.failing()]
    files["summary.json"] = dump_json({"mantissa_bits": pc.mantissa_bits, "suites": names, "results": summary})
    for fname, text in files.items():
        write_atomic(out / fname, text)
    if broke:
        for r in summary:
            if "error" in r:
                print(f"{r['scenario']}: {r['error']}", file=err)
        return EXIT_CONVERGENCE
    if failed:
        print("failing claims: " + ", ".join(failed), file=err)
        return EXIT_CLAIM
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (env CBOP_CONFIG)")
    common.add_argument("--out", help="output directory (env CBOP_OUT)")
    common.add_argument("--n", type=int, help="degree or largest n (env CBOP_N)")
    common.add_argument("--bits", type=int, help="mantissa bits (env CBOP_BITS)")
    common.add_argument("--quad-order", dest="quad_order", type=int, help="quadrature order (env CBOP_QUAD_ORDER)")
    p = argparse.ArgumentParser(prog="cbop", description="Cauchy biorthogonal and Hermite-Padé polynomial asymptotics")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("equilibrium", parents=[common], help="vector equilibrium of the configured pair")
    c = sub.add_parser("compute", parents=[common], help="compute one object")
    c.add_argument("what", choices=sorted(COMPUTE))
    c.add_argument("--measure", help="measure descriptor for szego/pade, e.g. 'chebyshev -1 1'")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", help="suite name or 'all' (env CBOP_SUITE)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = resolve(args)
        if args.command == "equilibrium":
            return cmd_equilibrium(rc)
        if args.command == "compute":
            return cmd_compute(rc, args.what)
        return cmd_verify(rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NumericalError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except CbopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
