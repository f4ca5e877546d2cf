"""Absolutely continuous measures on intervals, pairs, Nikishin systems.

A measure is stored as

    dmu(x) = (b - x)^alpha (x - a)^beta f(x) dx

with a smooth positive factor f.  The explicit endpoint exponents let the
quadrature absorb the singular part exactly (Gauss–Jacobi), and give the
Szegő machinery closed forms for the logarithmic endpoint terms.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConfigError, DomainError, SzegoConditionError
from .numkit import Interval, PrecisionConfig, QuadRule, _exact, cheb_grid, gauss_jacobi, quad_eta, to_mp

# ---------------------------------------------------------------------------
# density expressions

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {"sqrt": "sqrt", "exp": "exp", "ln": "ln", "log": "ln", "abs": "fabs"}
_CONSTS = {"pi": "pi", "e": "e"}


class Expr:
    """Arithmetic expression in one variable ``x``.

    Grammar: numbers, ``x``, ``pi``, ``e``, the operators ``+ - * / ^`` (``**``
    is accepted too), parentheses and the functions sqrt, exp, ln, abs.
    Anything else is rejected at parse time, so configs cannot run code.
    """

    def __init__(self, text: str):
        self.text = text.strip()
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}", column=exc.offset) from None
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            self._check(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            pass
        elif isinstance(node, ast.Name) and (node.id == "x" or node.id in _CONSTS):
            pass
        elif (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            self._check(node.args[0])
        else:
            bad = ast.get_source_segment(self.text.replace("^", "**"), node) or type(node).__name__
            raise ConfigError(f"unsupported element {bad!r} in expression {self.text!r}",
                              column=getattr(node, "col_offset", -1) + 1)

    def __call__(self, x, ctx):
        return self._eval(self._tree, x, ctx)

    def _eval(self, node, x, ctx):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, x, ctx), self._eval(node.right, x, ctx))
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, x, ctx)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant):
            # decimal literals are read exactly as written, not through a double
            src = ast.get_source_segment(self.text.replace("^", "**"), node)
            return ctx.mpf(src) if src else ctx.convert(node.value)
        if isinstance(node, ast.Name):
            return x if node.id == "x" else getattr(ctx, _CONSTS[node.id])
        return getattr(ctx, _FUNCS[node.func.id])(self._eval(node.args[0], x, ctx))

    def __repr__(self):
        return f"Expr({self.text!r})"


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Measure:
    interval: Interval
    kind: str
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    expr: Expr | None = None
    factor: Callable | None = None  # f(x, ctx) for programmatic measures
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def smooth(self, x, ctx):
        if self.kind == "chebyshev":
            return 1 / ctx.pi
        v = ctx.one
        if self.expr is not None:
            v = self.expr(x, ctx)
        if self.factor is not None:
            v = v * self.factor(x, ctx)
        return v

    def density(self, x, ctx):
        """mu'(x) with respect to dx."""
        a, b = self.interval.ends(ctx)
        v = self.smooth(x, ctx)
        if self.alpha:
            v *= ctx.power(b - x, to_mp(ctx, self.alpha))
        if self.beta:
            v *= ctx.power(x - a, to_mp(ctx, self.beta))
        return v

    def rule(self, cfg: PrecisionConfig, order: int | None = None) -> QuadRule:
        key = (cfg.mantissa_bits, order or cfg.quad_order)
        if key not in self._cache:
            base = gauss_jacobi(self.interval, self.alpha, self.beta, cfg, order)
            ctx = cfg.ctx
            f = [self.smooth(x, ctx) for x in base.nodes]
            for x, v in zip(base.nodes, f):
                if not v > 0:
                    raise SzegoConditionError(f"{self.name()}: density not positive at x={ctx.nstr(x, 15)}")
            self._cache[key] = base.scaled(f)
        return self._cache[key]

    def mass(self, cfg: PrecisionConfig):
        return cfg.ctx.fsum(self.rule(cfg).weights)

    def log_smooth(self, x, ctx):
        v = self.smooth(x, ctx)
        if not v > 0:
            raise SzegoConditionError(f"{self.name()}: density not positive at x={ctx.nstr(x, 15)}")
        return ctx.ln(v)

    def mirror(self) -> "Measure":
        """Image under x -> -x."""
        expr, factor = self.expr, self.factor
        if self.kind in ("custom", "function"):
            inner = self.smooth
            return Measure(self.interval.mirror(), "function", self.beta, self.alpha,
                           factor=lambda x, ctx: inner(-x, ctx), label=f"mirror({self.name()})")
        return Measure(self.interval.mirror(), self.kind, self.beta, self.alpha, expr, factor, self.label)

    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "jacobi":
            return f"jacobi({self.alpha},{self.beta})"
        if self.kind == "custom":
            return f"custom({self.expr.text})"
        return self.kind

    def describe(self) -> dict:
        d = {"kind": self.kind, "interval": [str(self.interval.a), str(self.interval.b)]}
        if self.kind in ("jacobi", "custom"):
            d["alpha"], d["beta"] = str(self.alpha), str(self.beta)
        if self.expr is not None:
            d["expr"] = self.expr.text
        if self.kind == "function":
            d["label"] = self.name()
        return d


def lebesgue(interval: Interval) -> Measure:
    return Measure(interval, "lebesgue")


def chebyshev(interval: Interval) -> Measure:
    """Arcsine probability measure dx / (pi sqrt((b-x)(x-a)))."""
    return Measure(interval, "chebyshev", Fraction(-1, 2), Fraction(-1, 2))


def jacobi(interval: Interval, alpha, beta) -> Measure:
    """(b-x)^alpha (x-a)^beta dx."""
    alpha, beta = _exact(alpha), _exact(beta)
    if alpha <= -1 or beta <= -1:
        raise DomainError("Jacobi exponents must exceed -1")
    return Measure(interval, "jacobi", alpha, beta)


def custom(interval: Interval, expr: str, alpha=0, beta=0) -> Measure:
    """(b-x)^alpha (x-a)^beta expr(x) dx, expr smooth and positive on the interval."""
    alpha, beta = _exact(alpha), _exact(beta)
    if alpha <= -1 or beta <= -1:
        raise DomainError("endpoint exponents must exceed -1")
    return Measure(interval, "custom", alpha, beta, Expr(expr))


def from_function(interval: Interval, f: Callable, alpha=0, beta=0, label="function") -> Measure:
    return Measure(interval, "function", _exact(alpha), _exact(beta), factor=f, label=label)


def with_factor(m: Measure, g: Callable, label: str) -> Measure:
    """The measure g(x) dmu(x) for a smooth positive g."""
    inner = m.smooth
    return Measure(m.interval, "function", m.alpha, m.beta,
                   factor=lambda x, ctx: inner(x, ctx) * g(x, ctx), label=label)


def markov_transform(m: Measure, z, cfg: PrecisionConfig | None = None):
    """mu-hat(z) = ∫ dmu(x) / (z - x) for z off the support."""
    cfg = cfg or PrecisionConfig()
    ctx = cfg.ctx
    z = ctx.convert(z)
    if m.interval.contains(z, ctx):
        raise DomainError(f"z={z} lies on the support {m.interval}")
    rule = m.rule(cfg)
    return ctx.fdot(rule.weights, [1 / (z - x) for x in rule.nodes])


@dataclass(frozen=True)
class MeasurePair:
    sigma1: Measure
    sigma2: Measure

    def __post_init__(self):
        if not self.sigma1.interval.disjoint(self.sigma2.interval):
            raise DomainError(f"intervals {self.sigma1.interval} and {self.sigma2.interval} overlap")

    @property
    def intervals(self):
        return self.sigma1.interval, self.sigma2.interval

    def swapped(self) -> "MeasurePair":
        return MeasurePair(self.sigma2, self.sigma1)


@dataclass(frozen=True)
class NikishinSystem:
    """s11 = sigma1, s22 = sigma2, ds12 = sigma2-hat dsigma1, ds21 = sigma1-hat dsigma2."""

    pair: MeasurePair
    cfg: PrecisionConfig

    def s12_density(self, x):
        ctx = self.cfg.ctx
        return markov_transform(self.pair.sigma2, x, self.cfg) * self.pair.sigma1.density(x, ctx)

    def s21_density(self, x):
        ctx = self.cfg.ctx
        return markov_transform(self.pair.sigma1, x, self.cfg) * self.pair.sigma2.density(x, ctx)

    def s12_rule(self) -> QuadRule:
        r = self.pair.sigma1.rule(self.cfg)
        return r.scaled([markov_transform(self.pair.sigma2, x, self.cfg) for x in r.nodes])

    def s21_rule(self) -> QuadRule:
        r = self.pair.sigma2.rule(self.cfg)
        return r.scaled([markov_transform(self.pair.sigma1, x, self.cfg) for x in r.nodes])


def nikishin(pair: MeasurePair, cfg: PrecisionConfig | None = None) -> NikishinSystem:
    cfg = cfg or PrecisionConfig()
    ns = NikishinSystem(pair, cfg)
    # sigma2-hat keeps one sign on the other interval; check it on the grid
    for rule in (ns.s12_rule(), ns.s21_rule()):
        signs = {w > 0 for w in rule.weights}
        if len(signs) != 1:
            raise DomainError("Nikishin product density changes sign on its interval")
    return ns


def szego_condition_value(m: Measure, cfg: PrecisionConfig | None = None):
    """∫ ln mu'(x) dη(x).

    The endpoint factors integrate in closed form, ∫ ln(b-x) dη = pi ln(r/2)
    with r the half-length, so only the smooth factor is sampled.
    """
    cfg = cfg or PrecisionConfig()
    ctx = cfg.ctx
    _, r = m.interval.center_radius(ctx)
    grid = cheb_grid(m.interval, cfg)
    smooth = quad_eta(lambda x: m.log_smooth(x, ctx), grid)
    return to_mp(ctx, m.alpha + m.beta) * ctx.pi * ctx.ln(r / 2) + smooth
