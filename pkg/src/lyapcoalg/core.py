"""Finite substrate: state spaces, the measurement scale, time monoids,
metrics, class-K maps and norms.

Everything here is exact. Scale values are :class:`fractions.Fraction`
instances and every container is immutable after construction.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

__all__ = [
    "InputError",
    "HorizonExceeded",
    "FiniteSpace",
    "MeasureScale",
    "TimeMonoid",
    "Metric",
    "ClassK",
    "GeneralizedElement",
    "StateFunction",
    "ValidationReport",
    "as_fraction",
    "metric_validate",
    "classk_validate",
    "norm_to_point",
    "norm_to_generalized",
]


class InputError(ValueError):
    """Malformed or inconsistent input (unknown labels, bad tables, ...)."""


class HorizonExceeded(ArithmeticError):
    """A time-monoid operation left the truncated carrier."""


def as_fraction(value: Any) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; reject floats."""
    if isinstance(value, bool):
        raise InputError(f"not a rational numeral: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational numeral: {value!r}") from None
    raise InputError(f"not a rational numeral: {value!r}")


@dataclass(frozen=True)
class FiniteSpace:
    """An ordered finite set of distinct, hashable state labels."""

    labels: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        index = {}
        for i, label in enumerate(labels):
            if not isinstance(label, Hashable):
                raise InputError(f"unhashable label {label!r}")
            if label in index:
                raise InputError(f"duplicate label {label!r}")
            index[label] = i
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", index)

    @classmethod
    def range(cls, n: int) -> FiniteSpace:
        return cls(tuple(range(n)))

    def __iter__(self) -> Iterator:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label) -> bool:
        try:
            return label in self._index
        except TypeError:
            return False

    def __hash__(self) -> int:
        return hash(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise InputError(f"unknown state {label!r}") from None

    def require(self, label) -> None:
        if label not in self:
            raise InputError(f"unknown state {label!r}")

    def product(self, other: FiniteSpace) -> FiniteSpace:
        # lexicographic, left factor major
        return FiniteSpace(tuple((a, b) for a in self.labels for b in other.labels))


@dataclass(frozen=True)
class MeasureScale:
    """A finite chain of non-negative rationals whose least element is 0."""

    values: tuple
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = tuple(as_fraction(v) for v in self.values)
        if not values or values[0] != 0:
            raise InputError("scale must start at 0")
        for lo, hi in zip(values, values[1:]):
            if not lo < hi:
                raise InputError(f"scale not strictly increasing at {lo}, {hi}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_members", frozenset(values))

    def __hash__(self) -> int:
        return hash(self.values)

    @classmethod
    def from_values(cls, values: Iterable) -> MeasureScale:
        """Sorted, deduplicated scale containing ``values`` and 0."""
        return cls(tuple(sorted({Fraction(0), *map(as_fraction, values)})))

    @property
    def zero(self) -> Fraction:
        return self.values[0]

    @property
    def top(self) -> Fraction:
        return self.values[-1]

    @property
    def space(self) -> FiniteSpace:
        """The scale viewed as a state space (carrier of the stable system)."""
        return FiniteSpace(self.values)

    def __contains__(self, value) -> bool:
        try:
            return as_fraction(value) in self._members
        except InputError:
            return False

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def position(self, value) -> int:
        try:
            return self.values.index(as_fraction(value))
        except ValueError:
            raise InputError(f"value {value} not in scale") from None


@dataclass(frozen=True)
class TimeMonoid:
    """Additive time truncated at a horizon.

    ``kind`` is ``"naturals"`` (step 1) or ``"grid"`` (multiples of a
    rational step). Sums leaving the horizon raise :class:`HorizonExceeded`
    instead of wrapping.
    """

    kind: str
    step: Fraction
    horizon: Fraction

    def __post_init__(self):
        if self.kind not in ("naturals", "grid"):
            raise InputError(f"unknown time kind {self.kind!r}")
        step, horizon = as_fraction(self.step), as_fraction(self.horizon)
        if step <= 0 or horizon <= 0:
            raise InputError("step and horizon must be positive")
        if self.kind == "naturals" and step != 1:
            raise InputError("naturals have step 1")
        if (horizon / step).denominator != 1:
            raise InputError("horizon must be a multiple of the step")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "horizon", horizon)

    @classmethod
    def naturals(cls, horizon: int) -> TimeMonoid:
        return cls("naturals", Fraction(1), Fraction(horizon))

    @classmethod
    def grid(cls, step, horizon) -> TimeMonoid:
        return cls("grid", as_fraction(step), as_fraction(horizon))

    @property
    def unit(self):
        return 0

    @property
    def nticks(self) -> int:
        return int(self.horizon / self.step)

    @property
    def carrier(self) -> tuple:
        if self.kind == "naturals":
            return tuple(range(self.nticks + 1))
        return tuple(k * self.step for k in range(self.nticks + 1))

    @property
    def space(self) -> FiniteSpace:
        return FiniteSpace(self.carrier)

    def ticks(self, t) -> int:
        """Number of steps in ``t`` (any non-negative multiple of the step)."""
        k = as_fraction(t) / self.step
        if k.denominator != 1 or k < 0:
            raise InputError(f"{t} is not a time value")
        return int(k)

    def at(self, k: int):
        return k if self.kind == "naturals" else k * self.step

    def in_horizon(self, t) -> bool:
        try:
            return self.ticks(t) <= self.nticks
        except InputError:
            return False

    def add(self, a, b):
        k = self.ticks(a) + self.ticks(b)
        if k > self.nticks:
            raise HorizonExceeded(f"{a} + {b} exceeds horizon {self.horizon}")
        return self.at(k)

    def check_laws(self) -> list[str]:
        """Associativity and unitality over every in-horizon combination."""
        violations = []
        carrier = self.carrier
        zero = self.unit
        for a in carrier:
            if self.add(zero, a) != a or self.add(a, zero) != a:
                violations.append(f"unit law fails at {a}")
        for a in carrier:
            for b in carrier:
                try:
                    ab = self.add(a, b)
                except HorizonExceeded:
                    continue
                for c in carrier:
                    try:
                        left = self.add(ab, c)
                        right = self.add(a, self.add(b, c))
                    except HorizonExceeded:
                        continue
                    if left != right:
                        violations.append(f"associativity fails at {(a, b, c)}")
        return violations


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def extend(self, other: ValidationReport, prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)
        self.notes.extend(prefix + n for n in other.notes)


@dataclass(frozen=True)
class Metric:
    """A distance table on ``space``; symmetry is not required."""

    space: FiniteSpace
    table: Mapping

    def __post_init__(self):
        object.__setattr__(
            self, "table", {k: as_fraction(v) for k, v in dict(self.table).items()}
        )

    @classmethod
    def from_function(cls, space: FiniteSpace, dist: Callable) -> Metric:
        return cls(space, {(x, y): dist(x, y) for x in space for y in space})

    @classmethod
    def absolute(cls, space: FiniteSpace) -> Metric:
        return cls.from_function(space, lambda x, y: abs(Fraction(x) - Fraction(y)))

    @classmethod
    def discrete(cls, space: FiniteSpace) -> Metric:
        return cls.from_function(space, lambda x, y: 0 if x == y else 1)

    def __call__(self, x, y) -> Fraction:
        try:
            return self.table[(x, y)]
        except KeyError:
            raise InputError(f"distance ({x!r}, {y!r}) undefined") from None

    def values(self) -> set:
        return set(self.table.values())

    def __hash__(self) -> int:
        return hash((self.space, frozenset(self.table.items())))


def metric_validate(d: Metric, E: FiniteSpace, R: MeasureScale) -> ValidationReport:
    """Check the kernel condition and non-negativity of ``d`` on ``E``.

    Asymmetry is reported as a note, never as a violation.
    """
    report = ValidationReport()
    for x, y in d.table:
        if x not in E or y not in E:
            raise InputError(f"metric references unknown label in ({x!r}, {y!r})")
    for x in E:
        for y in E:
            if (x, y) not in d.table:
                raise InputError(f"metric table missing ({x!r}, {y!r})")
            v = d.table[(x, y)]
            if x == y and v != R.zero:
                report.violations.append(f"non-zero diagonal at ({x},{x})")
            if x != y and v == R.zero:
                report.violations.append(f"zero off-diagonal at ({x},{y})")
            if v < 0:
                report.violations.append(f"negative value at ({x},{y})")
            elif v not in R:
                report.violations.append(f"value {v} outside scale at ({x},{y})")
    asym = [(x, y) for x in E for y in E if d.table[(x, y)] != d.table[(y, x)]]
    if asym:
        report.notes.append(f"metric is not symmetric, e.g. at {asym[0]}")
    return report


@dataclass(frozen=True)
class ClassK:
    """A map of scale values, intended to be an order automorphism fixing 0."""

    table: Mapping

    def __post_init__(self):
        object.__setattr__(
            self,
            "table",
            {as_fraction(k): as_fraction(v) for k, v in dict(self.table).items()},
        )

    @classmethod
    def identity(cls, R: MeasureScale) -> ClassK:
        return cls({r: r for r in R})

    def __call__(self, r) -> Fraction:
        return self.table[as_fraction(r)]

    def compose(self, other: ClassK) -> ClassK:
        """``self`` after ``other``."""
        return ClassK({r: self.table[v] for r, v in other.table.items()})

    def inverse(self) -> ClassK:
        return ClassK({v: r for r, v in self.table.items()})

    def __hash__(self) -> int:
        return hash(frozenset(self.table.items()))


def classk_validate(alpha: ClassK, R: MeasureScale) -> bool:
    """True iff ``alpha`` is a strictly increasing bijection of ``R`` fixing 0."""
    if set(alpha.table) != set(R.values):
        raise InputError("class-K table must be defined on exactly the scale values")
    if any(v not in R for v in alpha.table.values()):
        raise InputError("class-K table maps outside the scale")
    images = [alpha.table[r] for r in R]
    if alpha.table[R.zero] != R.zero:
        return False
    if len(set(images)) != len(images):
        return False
    return all(a < b for a, b in zip(images, images[1:]))


@dataclass(frozen=True)
class GeneralizedElement:
    """A map ``A -> E`` given by a table."""

    domain: FiniteSpace
    map: Mapping

    def __post_init__(self):
        object.__setattr__(self, "map", dict(self.map))
        for a in self.domain:
            if a not in self.map:
                raise InputError(f"generalized element undefined at {a!r}")

    @classmethod
    def point(cls, x) -> GeneralizedElement:
        return cls(FiniteSpace(("*",)), {"*": x})

    @property
    def image(self) -> frozenset:
        return frozenset(self.map[a] for a in self.domain)

    def __hash__(self) -> int:
        return hash((self.domain, frozenset(self.map.items())))


class StateFunction(Mapping):
    """A function ``E -> R`` stored as a table."""

    __slots__ = ("space", "_table")

    def __init__(self, space: FiniteSpace, table):
        if callable(table) and not isinstance(table, Mapping):
            table = {x: table(x) for x in space}
        table = dict(table)
        for x in space:
            if x not in table:
                raise InputError(f"state function undefined at {x!r}")
        self.space = space
        self._table = {x: as_fraction(table[x]) for x in space}

    def __getitem__(self, x) -> Fraction:
        try:
            return self._table[x]
        except (KeyError, TypeError):
            raise InputError(f"unknown state {x!r}") from None

    def __call__(self, x) -> Fraction:
        return self[x]

    def __iter__(self):
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __repr__(self) -> str:
        body = ", ".join(f"{x!r}: {v}" for x, v in self._table.items())
        return f"StateFunction({{{body}}})"

    def __hash__(self) -> int:
        return hash(frozenset(self._table.items()))

    def outside(self, R: MeasureScale) -> list:
        """States whose value is not a member of ``R``."""
        return [x for x, v in self._table.items() if v not in R]

    def then(self, alpha: Callable) -> StateFunction:
        return StateFunction(self.space, {x: alpha(v) for x, v in self._table.items()})


def norm_to_point(d: Metric, xstar) -> StateFunction:
    d.space.require(xstar)
    return StateFunction(d.space, {y: d(y, xstar) for y in d.space})


def norm_to_generalized(d: Metric, x: GeneralizedElement) -> StateFunction:
    """Pointwise minimum distance to the image of ``x``."""
    if len(x.domain) == 0:
        raise InputError("norm to empty generalized element undefined")
    for a in x.domain:
        d.space.require(x.map[a])
    return StateFunction(
        d.space, {y: min(d(y, x.map[a]) for a in x.domain) for y in d.space}
    )
