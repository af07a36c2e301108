"""Endofunctors on finite sets and their monoidal structure.

Four functors are provided: :class:`Identity`, :class:`Powerset`,
:class:`Labeled` (``P(A x -)``) and :class:`FinDist` (finitely supported
probability distributions with rational weights). Each one knows how to
map functions (``fmap``), combine values (the laxator ``pair``), embed a
point as a standing-still value (``unit``) and enumerate its values on a
small space, which is what the exhaustive law suites run on.

Functor values are plain hashable Python objects: the element itself,
a ``frozenset``, a ``frozenset`` of ``(label, element)`` pairs, or a
:class:`Dist`.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .core import FiniteSpace, InputError, MeasureScale, as_fraction

__all__ = [
    "Dist",
    "Functor",
    "Identity",
    "Powerset",
    "Labeled",
    "FinDist",
    "FOrder",
    "LawResult",
    "LawReport",
    "ONE",
    "fmap",
    "laxator",
    "fvalue_leq",
    "forder_violations",
    "check_monoidal_laws",
    "as_map",
]

#: the terminal space
ONE = FiniteSpace(("*",))


def as_map(g) -> Callable:
    if isinstance(g, Mapping):
        table = g

        def lookup(x):
            try:
                return table[x]
            except KeyError:
                raise InputError(f"map undefined at {x!r}") from None

        return lookup
    if callable(g):
        return g
    raise InputError(f"not a map: {g!r}")


class Dist(Mapping):
    """An immutable finitely supported probability distribution."""

    __slots__ = ("_weights", "_hash")

    def __init__(self, weights):
        clean = {}
        for x, w in dict(weights).items():
            w = as_fraction(w)
            if w < 0:
                raise InputError(f"negative weight {w} on {x!r}")
            if w:
                clean[x] = w
        if sum(clean.values()) != 1:
            raise InputError(f"weights sum to {sum(clean.values())}, not 1")
        self._weights = clean
        self._hash = hash(frozenset(clean.items()))

    @classmethod
    def _trusted(cls, weights: dict) -> Dist:
        # caller guarantees positive Fraction weights summing to 1
        d = cls.__new__(cls)
        d._weights = weights
        d._hash = hash(frozenset(weights.items()))
        return d

    @classmethod
    def dirac(cls, x) -> Dist:
        return cls._trusted({x: Fraction(1)})

    def __getitem__(self, x) -> Fraction:
        return self._weights[x]

    def __iter__(self):
        return iter(self._weights)

    def __len__(self) -> int:
        return len(self._weights)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Dist):
            return self._weights == other._weights
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{x!r}: {w}" for x, w in self._weights.items())
        return f"Dist({{{body}}})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._weights)

    @property
    def is_dirac(self) -> bool:
        return len(self._weights) == 1


class Functor:
    """Base class; subclasses are frozen dataclasses so they compare by value."""

    name = "functor"

    def fmap(self, g: Callable, v):
        raise NotImplementedError

    def pair(self, v, w):
        raise NotImplementedError

    def unit(self, x):
        raise NotImplementedError

    def elements(self, v) -> frozenset:
        """Carrier elements a value refers to."""
        raise NotImplementedError

    def check(self, v, space: FiniteSpace) -> None:
        """Raise :class:`InputError` unless ``v`` is a value over ``space``."""
        for x in self.elements(v):
            if x not in space:
                raise InputError(f"{self.name} value {v!r} refers to {x!r} outside the space")

    def values(self, space: FiniteSpace) -> Iterator:
        raise NotImplementedError

    def restrict(self, v, labels):
        """Drop transitions whose label is not in ``labels`` (labeled kind only)."""
        return v


@dataclass(frozen=True)
class Identity(Functor):
    name = "identity"

    def fmap(self, g, v):
        return g(v)

    def pair(self, v, w):
        return (v, w)

    def unit(self, x):
        return x

    def elements(self, v):
        return frozenset((v,))

    def values(self, space):
        return iter(space.labels)


def _subsets(items) -> Iterator[frozenset]:
    items = list(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


@dataclass(frozen=True)
class Powerset(Functor):
    name = "powerset"

    def fmap(self, g, v):
        return frozenset(g(x) for x in v)

    def pair(self, v, w):
        return frozenset((x, y) for x in v for y in w)

    def unit(self, x):
        return frozenset((x,))

    def elements(self, v):
        if not isinstance(v, frozenset):
            raise InputError(f"powerset value must be a set, got {v!r}")
        return v

    def values(self, space):
        return _subsets(space.labels)


@dataclass(frozen=True)
class Labeled(Functor):
    """``P(A x -)``: sets of labelled transitions."""

    labels: FiniteSpace
    name = "labeled"

    def __post_init__(self):
        if len(self.labels) == 0:
            raise InputError("labeled functor needs a nonempty label set")

    def fmap(self, g, v):
        return frozenset((a, g(x)) for a, x in v)

    def pair(self, v, w):
        return frozenset((a, (x, y)) for a, x in v for b, y in w if a == b)

    def unit(self, x):
        return frozenset((a, x) for a in self.labels)

    def elements(self, v):
        if not isinstance(v, frozenset):
            raise InputError(f"labeled value must be a set, got {v!r}")
        out = set()
        for item in v:
            if not (isinstance(item, tuple) and len(item) == 2):
                raise InputError(f"labeled transition must be a pair, got {item!r}")
            if item[0] not in self.labels:
                raise InputError(f"unknown transition label {item[0]!r}")
            out.add(item[1])
        return frozenset(out)

    def values(self, space):
        return _subsets((a, x) for a in self.labels for x in space)

    def restrict(self, v, labels):
        if labels is None:
            return v
        return frozenset((a, x) for a, x in v if a in labels)

    def successors(self, v, label) -> list:
        return [x for a, x in v if a == label]


@dataclass(frozen=True)
class FinDist(Functor):
    """Finitely supported distributions.

    ``max_denominator`` only bounds :meth:`values` enumeration; the functor
    itself accepts any rational weights.
    """

    max_denominator: int = field(default=4, compare=False)
    name = "findist"

    def fmap(self, g, v):
        out: dict = {}
        for x, w in v.items():
            y = g(x)
            out[y] = out[y] + w if y in out else w
        return Dist._trusted(out)

    def pair(self, v, w):
        return Dist._trusted({(x, y): p * q for x, p in v.items() for y, q in w.items()})

    def unit(self, x):
        return Dist.dirac(x)

    def elements(self, v):
        if not isinstance(v, Dist):
            raise InputError(f"findist value must be a Dist, got {v!r}")
        return v.support

    def values(self, space):
        seen = set()
        labels = space.labels
        n = len(labels)
        for q in range(1, self.max_denominator + 1):
            # compositions of q into n non-negative parts
            for cuts in itertools.combinations(range(q + n - 1), n - 1):
                parts, prev = [], -1
                for c in cuts + (q + n - 1,):
                    parts.append(c - prev - 1)
                    prev = c
                d = Dist({x: Fraction(k, q) for x, k in zip(labels, parts)})
                if d not in seen:
                    seen.add(d)
                    yield d


def fmap(F: Functor, g, v):
    return F.fmap(as_map(g), v)


def laxator(F: Functor, v, w):
    return F.pair(v, w)


@dataclass(frozen=True)
class FOrder:
    """An order on values of ``F R``.

    ``rule`` selects the comparison:

    * ``"scale"`` -- Identity: the scale order.
    * ``"lexicographic"`` -- Identity over pairs ``(t, v)``.
    * ``"upper"`` -- Powerset/Labeled: every element of the left set is
      below some element of the right set (labels ignored). This is the
      default; it agrees with ``"literal"`` whenever the right-hand side
      is a singleton.
    * ``"literal"`` -- Powerset/Labeled: every element of the left set is
      below every element of the right set. Not reflexive on sets with two
      distinct values, and vacuous on empty sets.
    * ``"dominance"`` -- FinDist: ``mu <= nu`` iff ``mu`` puts at least as
      much mass as ``nu`` on every initial segment ``[0, r)``.
    * ``"custom"`` -- ``relation(u, v)`` decides.
    """

    functor: Functor
    scale: MeasureScale
    rule: str = ""
    relation: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.rule:
            default = {
                Identity: "scale",
                Powerset: "upper",
                Labeled: "upper",
                FinDist: "dominance",
            }[type(self.functor)]
            object.__setattr__(self, "rule", "custom" if self.relation else default)
        allowed = {
            Identity: {"scale", "lexicographic", "custom"},
            Powerset: {"upper", "literal", "custom"},
            Labeled: {"upper", "literal", "custom"},
            FinDist: {"dominance", "custom"},
        }[type(self.functor)]
        if self.rule not in allowed:
            raise InputError(f"rule {self.rule!r} not available for {self.functor.name}")
        if self.rule == "custom" and self.relation is None:
            raise InputError("custom order needs a relation")

    def _points(self, v):
        if isinstance(self.functor, Labeled):
            return [x for _, x in v]
        return list(v)

    def leq(self, u, v) -> bool:
        rule = self.rule
        if rule == "custom":
            return bool(self.relation(u, v))
        if rule == "scale":
            return u <= v
        if rule == "lexicographic":
            return u[0] < v[0] or (u[0] == v[0] and u[1] <= v[1])
        if rule in ("upper", "literal"):
            us, vs = self._points(u), self._points(v)
            if rule == "literal":
                return all(a <= b for a in us for b in vs)
            return all(any(a <= b for b in vs) for a in us)
        # dominance: compare cumulative mass at every support point
        cuts = sorted(set(u) | set(v))
        cu = cv = Fraction(0)
        for r in cuts:
            cu += u.get(r, 0)
            cv += v.get(r, 0)
            if cu < cv:
                return False
        return True

    def touches_empty(self, u, v) -> bool:
        """Comparisons decided vacuously by an empty set (flagged in reports)."""
        return isinstance(self.functor, (Powerset, Labeled)) and (not u or not v)


def fvalue_leq(order: FOrder, u, v) -> bool:
    return order.leq(u, v)


def representable_values(F: Functor, scale: MeasureScale, max_scale: int = 4,
                         max_labels: int = 2) -> list:
    """Values of ``F R`` on a bounded prefix of the scale (and label set)."""
    carrier = FiniteSpace(scale.values[:max_scale])
    if isinstance(F, Labeled):
        F = Labeled(FiniteSpace(F.labels.labels[:max_labels]))
    return list(F.values(carrier))


def forder_violations(order: FOrder, values: list | None = None) -> list[tuple]:
    """Reflexivity and transitivity failures of ``order`` on ``values``.

    Returns ``("reflexivity", (u,))`` and ``("transitivity", (u, v, w))``
    witnesses; empty means the relation is a preorder on ``values``.
    """
    if values is None:
        values = representable_values(order.functor, order.scale)
    n = len(values)
    rel = np.zeros((n, n), dtype=bool)
    for i, u in enumerate(values):
        for j, v in enumerate(values):
            rel[i, j] = order.leq(u, v)
    out = []
    for i in np.flatnonzero(~rel.diagonal()):
        out.append(("reflexivity", (values[i],)))
    # R;R must be contained in R
    two_step = (rel.astype(np.int64) @ rel.astype(np.int64)) > 0
    bad = np.argwhere(two_step & ~rel)
    for i, k in bad[:10]:
        j = int(np.flatnonzero(rel[i] & rel[:, k])[0])
        out.append(("transitivity", (values[i], values[j], values[k])))
    return out


@dataclass
class LawResult:
    law: str
    passed: bool
    checked: int
    witness: object = None

    def __str__(self) -> str:
        status = "pass" if self.passed else f"FAIL witness={self.witness!r}"
        return f"{self.law}: {status} ({self.checked} instances)"


@dataclass
class LawReport:
    functor: Functor
    max_size: int
    results: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def __getitem__(self, law: str) -> LawResult:
        return self.results[law]


MAX_LAW_SIZE = 4


def _spaces(max_size: int) -> list[FiniteSpace]:
    return [FiniteSpace.range(n) for n in range(1, max_size + 1)]


def _assoc(p):
    (x, y), z = p
    return (x, (y, z))


def _check_d5(F: Functor, spaces) -> LawResult:
    checked = 0
    for X, Y, Z in itertools.product(spaces, repeat=3):
        fx, fy, fz = list(F.values(X)), list(F.values(Y)), list(F.values(Z))
        left_inner = {(u, v): F.pair(u, v) for u in fx for v in fy}
        right_inner = {(v, w): F.pair(v, w) for v in fy for w in fz}
        for (u, v), uv in left_inner.items():
            for w in fz:
                left = F.fmap(_assoc, F.pair(uv, w))
                right = F.pair(u, right_inner[(v, w)])
                checked += 1
                if left != right:
                    return LawResult("D5", False, checked, (u, v, w))
    return LawResult("D5", True, checked)


def _check_d6(F: Functor, spaces) -> LawResult:
    checked = 0
    for A, B in itertools.product(spaces, repeat=2):
        for a in A:
            for b in B:
                checked += 1
                if F.pair(F.unit(a), F.unit(b)) != F.unit((a, b)):
                    return LawResult("D6", False, checked, (a, b))
    return LawResult("D6", True, checked)


def _check_d7(F: Functor, spaces) -> LawResult:
    checked = 0
    zero_one = F.unit("*")
    for X in spaces:
        for u in F.values(X):
            checked += 1
            left = F.fmap(lambda p: p[1], F.pair(zero_one, u))
            right = F.fmap(lambda p: p[0], F.pair(u, zero_one))
            if left != u or right != u:
                return LawResult("D7", False, checked, u)
    return LawResult("D7", True, checked)


def _check_d9(F: Functor, spaces, order: FOrder) -> LawResult:
    checked = 0
    scale = order.scale.values
    for A in spaces:
        values = list(F.values(A))
        maps = list(itertools.product(scale, repeat=len(A)))
        for f in maps:
            for g in maps:
                if not all(a <= b for a, b in zip(f, g)):
                    continue
                ft = dict(zip(A.labels, f))
                gt = dict(zip(A.labels, g))
                for u in values:
                    checked += 1
                    if not order.leq(F.fmap(ft.__getitem__, u), F.fmap(gt.__getitem__, u)):
                        return LawResult("D9", False, checked, (ft, gt, u))
    return LawResult("D9", True, checked)


def check_monoidal_laws(F: Functor, max_size: int, scale: MeasureScale | None = None,
                        order: FOrder | None = None) -> LawReport:
    """Exhaustively check D5 (associativity), D6 (stationary compatibility),
    D7 (unit) and D9 (order preservation) on every space of size
    ``1..max_size`` and, for D9, every pointwise-ordered pair of maps into
    ``scale`` (default ``{0, 1, 2}``).
    """
    if max_size > MAX_LAW_SIZE:
        raise ValueError(f"max_size {max_size} exceeds the guard {MAX_LAW_SIZE}")
    if max_size < 1:
        raise ValueError("max_size must be positive")
    scale = scale or MeasureScale((0, 1, 2))
    order = order or FOrder(F, scale)
    spaces = _spaces(max_size)
    report = LawReport(F, max_size)
    for result in (
        _check_d5(F, spaces),
        _check_d6(F, spaces),
        _check_d7(F, spaces),
        _check_d9(F, spaces, order),
    ):
        report.results[result.law] = result
    return report
