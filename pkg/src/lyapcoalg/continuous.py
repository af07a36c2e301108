"""Vector fields on flat boxes: RK4, Lie-derivative checks and discretization.

Fields and scalars are strings in a small expression language parsed with
:mod:`ast`::

    expr  := number | x1 .. xn | pi | e
           | expr (+ - * / **) expr | -expr
           | exp(expr) | sin(expr) | cos(expr) | min(expr, ...) | max(expr, ...)

For one-dimensional fields ``x`` is accepted as a synonym for ``x1``.
Evaluation stays in exact rationals as long as the inputs are rational and
no transcendental function is involved; otherwise it falls back to floats.
"""

from __future__ import annotations

import ast
import itertools
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .core import FiniteSpace, InputError, MeasureScale, Metric, as_fraction
from .functors import Identity
from .systems import Coalgebra

__all__ = [
    "ExpressionError",
    "Expression",
    "VectorField",
    "ScalarField",
    "SampledTrajectory",
    "rk4_step",
    "rk4_integrate",
    "LieReport",
    "lie_derivative_check",
    "Discretization",
    "discretize",
    "RATIONAL_DENOMINATOR",
]

RATIONAL_DENOMINATOR = 2**20


class ExpressionError(InputError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {"exp": math.exp, "sin": math.sin, "cos": math.cos, "min": min, "max": max}
_TRANSCENDENTAL = {"exp", "sin", "cos"}
_CONSTANTS = {"pi": math.pi, "e": math.e}


def _power(a, b):
    if isinstance(b, Fraction) and b.denominator == 1:
        return a ** int(b)
    return float(a) ** float(b)


class Expression:
    """A parsed arithmetic expression over ``x1..xn``."""

    def __init__(self, source: str, dim: int):
        self.source = source.strip()
        self.dim = dim
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
        self.rational = True
        self._fn = self._compile(tree.body)

    def _variable(self, name: str) -> int:
        if name == "x" and self.dim == 1:
            return 0
        if name.startswith("x") and name[1:].isdigit():
            i = int(name[1:])
            if 1 <= i <= self.dim:
                return i - 1
        raise ExpressionError(f"unknown variable {name!r} in {self.source!r}")

    def _compile(self, node) -> Callable:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            text = ast.get_source_segment(self.source, node) or repr(node.value)
            value = Fraction(text)
            return lambda x: value
        if isinstance(node, ast.Name):
            if node.id in _CONSTANTS:
                self.rational = False
                value = _CONSTANTS[node.id]
                return lambda x: value
            i = self._variable(node.id)
            return lambda x: x[i]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = self._compile(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda x: -inner(x)
            return inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = self._compile(node.left), self._compile(node.right)
            if isinstance(node.op, ast.Pow):
                return lambda x: _power(left(x), right(x))
            if isinstance(node.op, ast.Div):
                def divide(x):
                    den = right(x)
                    if den == 0:
                        raise ExpressionError(
                            f"division by zero in {self.source!r} at {tuple(x)}")
                    return left(x) / den
                return divide
            op = _BINOPS[type(node.op)]
            return lambda x: op(left(x), right(x))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id in _FUNCS and not node.keywords:
            name = node.func.id
            args = [self._compile(a) for a in node.args]
            if name in _TRANSCENDENTAL:
                self.rational = False
                if len(args) != 1:
                    raise ExpressionError(f"{name} takes one argument")
                fn, arg = _FUNCS[name], args[0]
                return lambda x: fn(float(arg(x)))
            if not args:
                raise ExpressionError(f"{name} needs arguments")
            fn = _FUNCS[name]
            return lambda x: fn(a(x) for a in args)
        raise ExpressionError(f"unsupported syntax in {self.source!r}: {ast.dump(node)[:40]}")

    def __call__(self, x: Sequence):
        if len(x) != self.dim:
            raise ExpressionError(f"expected {self.dim} coordinates, got {len(x)}")
        try:
            return self._fn(x)
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            raise ExpressionError(f"cannot evaluate {self.source!r} at {tuple(x)}: {exc}") from None

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"


@dataclass(frozen=True)
class VectorField:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InputError("a vector field needs at least one component")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_exprs", tuple(Expression(c, len(comps)) for c in comps))

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def rational(self) -> bool:
        return all(e.rational for e in self._exprs)

    def __call__(self, x: Sequence) -> tuple:
        return tuple(e(x) for e in self._exprs)


@dataclass(frozen=True)
class ScalarField:
    expression: str
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "_expr", Expression(self.expression, self.dim))

    def __call__(self, x: Sequence):
        return self._expr(x)


@dataclass
class SampledTrajectory:
    h: object
    points: list

    @property
    def endpoint(self) -> tuple:
        return self.points[-1]


def _axpy(a, x, y):
    return tuple(yi + a * xi for xi, yi in zip(x, y))


def rk4_step(f: VectorField, x: Sequence, h) -> tuple:
    k1 = f(x)
    k2 = f(_axpy(h / 2, k1, x))
    k3 = f(_axpy(h / 2, k2, x))
    k4 = f(_axpy(h, k3, x))
    return tuple(xi + h * (a + 2 * b + 2 * c + d) / 6
                 for xi, a, b, c, d in zip(x, k1, k2, k3, k4))


def rk4_integrate(f: VectorField, x0: Sequence, h, n: int,
                  exact: bool | None = None) -> SampledTrajectory:
    """``n`` classical Runge-Kutta steps of size ``h`` from ``x0``.

    With ``exact`` (default: ``h`` is not a float and the field is rational)
    the arithmetic is carried out in :class:`~fractions.Fraction`.
    """
    if exact is None:
        exact = not isinstance(h, float) and f.rational
    if exact:
        h = as_fraction(h)
        x = tuple(as_fraction(v) if not isinstance(v, float) else Fraction(v) for v in x0)
    else:
        h = float(h)
        x = tuple(float(v) for v in x0)
    if h <= 0:
        raise InputError("step must be positive")
    if len(x) != f.dim:
        raise InputError(f"initial point has {len(x)} coordinates, field has {f.dim}")
    points = [x]
    for _ in range(n):
        x = rk4_step(f, x, h)
        points.append(x)
    return SampledTrajectory(h, points)


@dataclass
class LieReport:
    ok: bool
    worst_point: tuple
    worst_value: float
    values: list = field(repr=False, default_factory=list)
    tol: float = 0.0


def lie_derivative_check(V: ScalarField, f: VectorField, samples, eps: float = 1e-5,
                         tol: float | None = None) -> LieReport:
    """Central difference of ``V`` along ``f``; passes iff every value ``<= tol``."""
    if eps <= 0:
        raise InputError("eps must be positive")
    if tol is None:
        tol = 1e-9 + 4 * eps * eps
    if tol <= 0:
        raise InputError("tol must be positive")
    values = []
    worst, worst_point = -math.inf, None
    for p in samples:
        x = tuple(float(c) for c in (p if isinstance(p, (tuple, list)) else (p,)))
        fx = tuple(float(c) for c in f(x))
        plus = tuple(a + eps * b for a, b in zip(x, fx))
        minus = tuple(a - eps * b for a, b in zip(x, fx))
        val = (float(V(plus)) - float(V(minus))) / (2 * eps)
        values.append(val)
        if val > worst:
            worst, worst_point = val, x
    return LieReport(worst <= tol, worst_point, worst, values, tol)


def _rationalize(x, denominator: int = RATIONAL_DENOMINATOR) -> Fraction:
    return Fraction(round(x * denominator), denominator)


@dataclass
class Discretization:
    system: Coalgebra
    metric: Metric
    scale: MeasureScale
    centers: dict
    clamped: list

    def nearest(self, point: Sequence):
        """The state whose cell center is closest to ``point``."""
        return min(self.centers, key=lambda s: sum(
            (float(c) - float(p)) ** 2 for c, p in zip(self.centers[s], point)))


def discretize(f: VectorField, box: Sequence, h, denominator: int = RATIONAL_DENOMINATOR
               ) -> Discretization:
    """Cell-center grid system of one RK4 step followed by nearest-center projection.

    ``box`` lists ``(lo, hi, cells)`` per axis. States are cell indices
    (ints in one dimension, tuples otherwise). Steps leaving the box are
    clamped to the boundary cell and reported in ``clamped``.
    """
    if len(box) != f.dim:
        raise InputError(f"box has {len(box)} axes, field has {f.dim}")
    axes = []
    for lo, hi, cells in box:
        lo, hi = as_fraction(lo), as_fraction(hi)
        if not hi > lo or int(cells) < 1:
            raise InputError("empty box")
        width = (hi - lo) / int(cells)
        axes.append((lo, width, int(cells)))
    h = float(as_fraction(h) if not isinstance(h, float) else h)
    if h <= 0:
        raise InputError("step must be positive")

    index_sets = list(itertools.product(*(range(c) for _, _, c in axes)))
    one_d = f.dim == 1
    label = (lambda idx: idx[0]) if one_d else (lambda idx: idx)
    centers = {label(idx): tuple(lo + (i + Fraction(1, 2)) * w
                                 for i, (lo, w, _) in zip(idx, axes)) for idx in index_sets}
    dynamics, clamped = {}, []
    for idx in index_sets:
        x = tuple(float(c) for c in centers[label(idx)])
        y = rk4_step(f, x, h)
        target, was_clamped = [], False
        for yi, (lo, w, cells) in zip(y, axes):
            k = math.floor((yi - float(lo)) / float(w))
            if k < 0 or k >= cells:
                was_clamped = True
            target.append(min(max(k, 0), cells - 1))
        if was_clamped:
            clamped.append(label(idx))
        dynamics[label(idx)] = label(tuple(target))
    space = FiniteSpace(tuple(label(idx) for idx in index_sets))

    def dist(a, b):
        sq = sum((p - q) ** 2 for p, q in zip(centers[a], centers[b]))
        if one_d:
            return _rationalize(abs(centers[a][0] - centers[b][0]), denominator) \
                if sq else Fraction(0)
        return _rationalize(math.sqrt(sq), denominator) if sq else Fraction(0)

    metric = Metric.from_function(space, dist)
    scale = MeasureScale.from_values(metric.values() | {Fraction(0)})
    system = Coalgebra(Identity(), space, dynamics)
    return Discretization(system, metric, scale, centers, clamped)
