"""Flows (monoid actions), orbits, and the derivative/integral pair.

Every action of discrete time on a finite set is determined by the map it
induces for one step, so a :class:`Flow` stores only that generator.
Queries ``phi(t, x)`` at any multiple of the step are answered exactly
from the orbit of ``x``; this is also what makes suprema over all of time
finite computations.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    FiniteSpace,
    GeneralizedElement,
    HorizonExceeded,
    InputError,
    TimeMonoid,
)
from .functors import ONE, Labeled, as_map
from .systems import (
    Coalgebra,
    CompletenessReport,
    UnitClock,
    deterministic_step,
    is_T_complete,
)

__all__ = [
    "Orbit",
    "Flow",
    "IncompleteSystemError",
    "orbit",
    "is_flow",
    "flow_violations",
    "derivative",
    "integral",
    "equilibrium_check",
    "equilibrium_check_sys",
    "forward_invariant_check",
]


class IncompleteSystemError(InputError):
    """The system has no unique solution flow."""

    def __init__(self, report: CompletenessReport):
        super().__init__(f"system is not T-complete: {report.failures[:5]}")
        self.report = report


@dataclass(frozen=True)
class Orbit:
    """``x0, step(x0), ...`` split into a transient prefix and a cycle."""

    prefix: tuple
    cycle: tuple

    @property
    def cycle_start(self) -> int:
        return len(self.prefix)

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)

    @property
    def states(self) -> tuple:
        return self.prefix + self.cycle

    def at(self, k: int):
        """State after ``k`` steps."""
        if k < len(self.prefix):
            return self.prefix[k]
        return self.cycle[(k - len(self.prefix)) % len(self.cycle)]


def orbit(step, x0) -> Orbit:
    step = as_map(step)
    seen = {}
    path = []
    x = x0
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = step(x)
    start = seen[x]
    return Orbit(tuple(path[:start]), tuple(path[start:]))


@dataclass(frozen=True)
class Flow:
    """A time-monoid action on ``space`` given by its one-step generator."""

    time: TimeMonoid
    space: FiniteSpace
    generator: Mapping
    _orbits: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        gen = dict(self.generator)
        for x in self.space:
            if x not in gen:
                raise InputError(f"flow generator undefined at {x!r}")
            if gen[x] not in self.space:
                raise InputError(f"flow generator leaves the space at {x!r}")
        object.__setattr__(self, "generator", gen)

    def __hash__(self) -> int:
        return hash((self.time, self.space, frozenset(self.generator.items())))

    @classmethod
    def from_step(cls, time: TimeMonoid, space: FiniteSpace, step) -> Flow:
        step = as_map(step)
        return cls(time, space, {x: step(x) for x in space})

    @classmethod
    def from_action(cls, time: TimeMonoid, space: FiniteSpace, action) -> Flow:
        """Validate an action table (or callable) and compress it."""
        bad = flow_violations(action, time, space)
        if bad:
            raise InputError(f"not a flow: {bad[0]}")
        act = _as_action(action)
        return cls(time, space, {x: act(time.step, x) for x in space})

    def orbit(self, x) -> Orbit:
        if x not in self._orbits:
            self.space.require(x)
            self._orbits[x] = orbit(self.generator, x)
        return self._orbits[x]

    def __call__(self, t, x):
        return self.orbit(x).at(self.time.ticks(t))

    def table(self) -> dict:
        """The action on the in-horizon carrier, keyed by ``(t, x)``."""
        return {(t, x): self(t, x) for t in self.time.carrier for x in self.space}


def _as_action(action) -> Callable:
    if isinstance(action, Mapping):
        table = action

        def act(t, x):
            try:
                return table[(t, x)]
            except KeyError:
                raise InputError(f"action undefined at {(t, x)!r}") from None

        return act
    return action


def flow_violations(action, time: TimeMonoid, space: FiniteSpace) -> list[str]:
    """Initialization and composition failures over in-horizon times."""
    act = _as_action(action)
    out = []
    for x in space:
        if act(time.unit, x) != x:
            out.append(f"initialization fails at {x!r}")
    for t1 in time.carrier:
        for t2 in time.carrier:
            try:
                t12 = time.add(t1, t2)
            except HorizonExceeded:
                continue
            for x in space:
                if act(t1, act(t2, x)) != act(t12, x):
                    out.append(f"composition fails at t1={t1}, t2={t2}, x={x!r}")
    return out


def is_flow(action, time: TimeMonoid, space: FiniteSpace) -> bool:
    return not flow_violations(action, time, space)


def derivative(phi, clock: UnitClock, space: FiniteSpace | None = None) -> Coalgebra:
    """The system ``F phi . L_E . (0 x id)``.

    ``phi`` is a :class:`Flow` or any action callable ``(t, x) -> y``;
    for the latter ``space`` is required. States where the composite leaves
    the horizon are left without dynamics.
    """
    if space is None:
        space = phi.space
    F = clock.functor
    zero = clock.time.unit if clock.time is not None else 0
    tick = clock.dynamics.get(zero)
    if tick is None:
        raise InputError("clock has no transition at time 0")

    def act(p):
        return phi(p[0], p[1])

    dynamics = {}
    for x in space:
        if isinstance(F, Labeled):
            # per-edge truncation, matching the clock's window
            edges = []
            for a, p in F.pair(tick, F.unit(x)):
                try:
                    edges.append((a, act(p)))
                except HorizonExceeded:
                    continue
            dynamics[x] = frozenset(edges)
            continue
        try:
            dynamics[x] = F.fmap(act, F.pair(tick, F.unit(x)))
        except HorizonExceeded:
            continue
    return Coalgebra(F, space, dynamics)


def integral(f: Coalgebra, clock: UnitClock) -> Flow:
    """The unique solution flow of a T-complete system."""
    report = is_T_complete(f, clock)
    if not report.complete:
        raise IncompleteSystemError(report)
    return Flow(clock.time, f.space, deterministic_step(f, clock))


def equilibrium_check(xstar, phi: Flow) -> bool:
    """``phi(t, x*) = x*`` for every in-horizon ``t``."""
    phi.space.require(xstar)
    return all(phi(t, xstar) == xstar for t in phi.time.carrier)


def equilibrium_check_sys(xstar, f: Coalgebra) -> bool:
    """``f(x*) = F x* (0_1(*))``: the state's dynamics is standing still."""
    f.space.require(xstar)
    F = f.functor
    return f.dynamics.get(xstar) == F.fmap(lambda _: xstar, F.unit(ONE.labels[0]))


def forward_invariant_check(x: GeneralizedElement, phi: Flow) -> bool:
    """The image of ``x`` is closed under every in-horizon ``phi_t``."""
    image = x.image
    return all(phi(t, y) in image for t in phi.time.carrier for y in image)
