"""Coalgebras (F-systems) on finite spaces.

A :class:`Coalgebra` assigns each state a functor value. Systems derived
from a truncated clock carry two pieces of horizon bookkeeping:

* states whose clock successor lies beyond the horizon have no dynamics
  entry (``dynamics`` is partial), and
* for the labeled functor with time labels, ``window[state]`` is the set of
  labels ``r`` whose target ``t + r`` is still in the horizon.

Morphism squares skip undefined states and compare labeled values only on
the window, so truncation never manufactures a failure at the boundary.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .core import FiniteSpace, HorizonExceeded, InputError, TimeMonoid
from .functors import (
    ONE,
    FinDist,
    Functor,
    Identity,
    Labeled,
    Powerset,
    as_map,
)

__all__ = [
    "Coalgebra",
    "UnitClock",
    "CompletenessReport",
    "stationary",
    "unit_clock",
    "morphism_witness",
    "is_system_morphism",
    "tensor",
    "build_L",
    "is_trajectory",
    "is_solution",
    "is_T_complete",
    "behavioral_lts",
    "time_labels",
]


@dataclass(frozen=True, eq=False)
class Coalgebra:
    functor: Functor
    space: FiniteSpace
    dynamics: Mapping
    window: Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        dynamics = dict(self.dynamics)
        for x, v in dynamics.items():
            if x not in self.space:
                raise InputError(f"dynamics given for unknown state {x!r}")
            self.functor.check(v, self.space)
        object.__setattr__(self, "dynamics", dynamics)

    def __call__(self, x):
        try:
            return self.dynamics[x]
        except KeyError:
            raise InputError(f"no dynamics at {x!r}") from None

    def __eq__(self, other) -> bool:
        # clocks compare equal to plain systems with the same data
        if not isinstance(other, Coalgebra):
            return NotImplemented
        return (self.functor, self.space, self.dynamics) == (
            other.functor, other.space, other.dynamics)

    def __hash__(self) -> int:
        return hash((self.functor, self.space, frozenset(self.dynamics.items())))

    @property
    def total(self) -> bool:
        return len(self.dynamics) == len(self.space)

    def labels_at(self, x):
        """Visible transition labels at ``x`` (None: all)."""
        if self.window is None:
            return None
        return self.window.get(x)

    @classmethod
    def from_map(cls, functor: Functor, space: FiniteSpace, step) -> Coalgebra:
        step = as_map(step)
        return cls(functor, space, {x: step(x) for x in space})


@dataclass(frozen=True, eq=False)
class UnitClock(Coalgebra):
    """The unit clock on a time monoid carrier."""

    time: TimeMonoid | None = None


@dataclass
class CompletenessReport:
    complete: bool
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.complete


def time_labels(time: TimeMonoid) -> Labeled:
    """The labeled functor whose labels are the time carrier."""
    return Labeled(time.space)


def stationary(F: Functor, X: FiniteSpace) -> Coalgebra:
    """The standing-still system ``x -> 0_X(x)``."""
    return Coalgebra(F, X, {x: F.unit(x) for x in X})


def unit_clock(F: Functor, time: TimeMonoid) -> UnitClock:
    """The clock ``t -> t + step`` in the shape of ``F``.

    For the labeled functor the labels must be the time carrier and the
    clock is ``t -> {(r, t + r)}`` over every in-horizon ``r``.
    """
    T = time.space
    dynamics, window = {}, None
    if isinstance(F, Labeled):
        if F.labels != T:
            raise InputError("labeled unit clock needs the time carrier as labels")
        window = {}
        for t in T:
            edges = []
            for r in T:
                try:
                    edges.append((r, time.add(t, r)))
                except HorizonExceeded:
                    continue
            dynamics[t] = frozenset(edges)
            window[t] = frozenset(r for r, _ in edges)
    else:
        for t in T:
            try:
                nxt = time.add(t, time.step)
            except HorizonExceeded:
                continue
            dynamics[t] = F.unit(nxt)
    return UnitClock(F, T, dynamics, window, time)


def _same_kind(f: Coalgebra, g: Coalgebra) -> None:
    if f.functor != g.functor:
        raise InputError(f"functor mismatch: {f.functor.name} vs {g.functor.name}")


def morphism_witness(g, f: Coalgebra, f2: Coalgebra):
    """First state where ``F g . f != f2 . g``, or None when ``g`` is a morphism."""
    _same_kind(f, f2)
    g = as_map(g)
    F = f.functor
    for x in f.space:
        if x not in f.dynamics:
            continue
        gx = g(x)
        if gx not in f2.space:
            raise InputError(f"map sends {x!r} to {gx!r}, outside the target space")
        if gx not in f2.dynamics:
            # target truncated at the horizon
            continue
        left = F.fmap(g, f.dynamics[x])
        right = F.restrict(f2.dynamics[gx], f.labels_at(x))
        if left != right:
            return x
    return None


def is_system_morphism(g, f: Coalgebra, f2: Coalgebra) -> bool:
    return morphism_witness(g, f, f2) is None


def tensor(f: Coalgebra, g: Coalgebra) -> Coalgebra:
    """``psi . (f x g)`` on the product space."""
    _same_kind(f, g)
    F = f.functor
    space = f.space.product(g.space)
    dynamics, window = {}, None
    if f.window is not None or g.window is not None:
        window = {}
    for a, b in space:
        if a not in f.dynamics or b not in g.dynamics:
            continue
        dynamics[(a, b)] = F.pair(f.dynamics[a], g.dynamics[b])
        if window is not None:
            wa, wb = f.labels_at(a), g.labels_at(b)
            if wa is None:
                window[(a, b)] = wb
            elif wb is None:
                window[(a, b)] = wa
            else:
                window[(a, b)] = wa & wb
    return Coalgebra(F, space, dynamics, window)


def build_L(clock: UnitClock, X: FiniteSpace) -> Coalgebra:
    """The system ``1_T (x) 0_X`` on ``T x X``."""
    return tensor(clock, stationary(clock.functor, X))


def is_trajectory(c, f: Coalgebra, clock: UnitClock) -> bool:
    """``c : T -> E`` is a system map from the clock into ``f``."""
    return is_system_morphism(c, clock, f)


def is_solution(phi, f: Coalgebra, clock: UnitClock, A: FiniteSpace | None = None) -> bool:
    """``phi : T x A -> E`` is a system map ``L_A -> f``.

    ``phi`` may be a table keyed by ``(t, a)``, a two-argument callable or a
    :class:`~lyapcoalg.flows.Flow` (then ``A`` defaults to its space).
    """
    if A is None:
        A = getattr(phi, "space", None) or f.space
    if isinstance(phi, Mapping):
        table = phi
        g = as_map(table)
    else:
        call = phi
        def g(p):
            return call(p[0], p[1])
    return is_system_morphism(g, build_L(clock, A), f)


def _labeled_complete(f: Coalgebra, clock: UnitClock) -> CompletenessReport:
    F: Labeled = f.functor
    time = clock.time
    failures = []
    succ = {}
    for x in f.space:
        if x not in f.dynamics:
            failures.append((x, "no-extension"))
            continue
        row = {}
        for r in F.labels:
            targets = F.successors(f.dynamics[x], r)
            if not targets:
                failures.append((x, "no-extension"))
                break
            if len(targets) > 1:
                failures.append((x, "multiple-extensions"))
                break
            row[r] = targets[0]
        else:
            succ[x] = row
    if failures:
        return CompletenessReport(False, failures)
    # deterministic and total; labels must also act: 0 is identity and
    # r-successor of the t-successor is the (t+r)-successor
    for x in f.space:
        if succ[x][time.unit] != x:
            failures.append((x, "no-extension"))
            continue
        for t in F.labels:
            for r in F.labels:
                try:
                    tr = time.add(t, r)
                except HorizonExceeded:
                    continue
                if succ[succ[x][t]][r] != succ[x][tr]:
                    failures.append((x, "no-extension"))
                    break
            else:
                continue
            break
    return CompletenessReport(not failures, failures)


def is_T_complete(f: Coalgebra, clock: UnitClock) -> CompletenessReport:
    """Decide by the local criterion whether every initial state has exactly
    one trajectory.

    Identity systems are always complete; graphs and labelled systems need
    exactly one successor (per label); distributions must be Dirac.
    Failure reasons: ``"no-extension"`` for a missing successor or labels
    that do not compose, ``"multiple-extensions"`` for branching.
    """
    _same_kind(f, clock)
    F = f.functor
    if isinstance(F, Labeled):
        return _labeled_complete(f, clock)
    failures = []
    for x in f.space:
        if x not in f.dynamics:
            failures.append((x, "no-extension"))
            continue
        v = f.dynamics[x]
        if isinstance(F, Powerset):
            if not v:
                failures.append((x, "no-extension"))
            elif len(v) > 1:
                failures.append((x, "multiple-extensions"))
        elif isinstance(F, FinDist):
            if not v.is_dirac:
                failures.append((x, "multiple-extensions"))
    return CompletenessReport(not failures, failures)


def deterministic_step(f: Coalgebra, clock: UnitClock) -> dict:
    """The one-tick successor map of a T-complete system."""
    F = f.functor
    step = clock.time.step if clock.time is not None else 1
    out = {}
    for x in f.space:
        v = f.dynamics[x]
        if isinstance(F, Identity):
            out[x] = v
        elif isinstance(F, Powerset):
            (out[x],) = v
        elif isinstance(F, FinDist):
            (out[x],) = v.support
        else:
            (out[x],) = F.successors(v, step)
    return out


def behavioral_lts(phi) -> Coalgebra:
    """The labelled system ``x -> {(t, phi(t, x))}`` over the time carrier."""
    time = phi.time
    F = time_labels(time)
    return Coalgebra(
        F, phi.space, {x: frozenset((t, phi(t, x)) for t in time.carrier) for x in phi.space}
    )


def terminal_stationary(F: Functor) -> Coalgebra:
    return stationary(F, ONE)

