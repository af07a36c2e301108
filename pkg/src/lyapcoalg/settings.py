"""Ready-made stability settings and small example systems."""

from __future__ import annotations

from fractions import Fraction

from .core import FiniteSpace, MeasureScale, Metric, TimeMonoid
from .flows import Flow
from .functors import FinDist, FOrder, Functor, Identity, Labeled, Powerset
from .lyapunov import DynamicSetting
from .systems import Coalgebra, behavioral_lts, stationary, time_labels, unit_clock

__all__ = [
    "KINDS",
    "make_setting",
    "discrete_setting",
    "graph_setting",
    "markov_setting",
    "behavioral_lts_setting",
    "bundled_settings",
    "halving_system",
    "doubling_system",
    "default_scale",
]

KINDS = ("identity", "powerset", "labeled", "findist")


def default_scale(d: Metric) -> MeasureScale:
    """The distinct metric values, which always include 0."""
    return MeasureScale.from_values(d.values() | {Fraction(0)})


def _sigma(F: Functor, scale: MeasureScale, time: TimeMonoid, converse: bool) -> Coalgebra:
    if isinstance(F, Labeled) and not converse:
        # every measurement is only required to stay below its start
        return Coalgebra(F, scale.space,
                         {r: frozenset({(time.unit, r)}) for r in scale.space})
    return stationary(F, scale.space)


def make_setting(kind: str, space: FiniteSpace, metric: Metric, scale: MeasureScale | None = None,
                 time: TimeMonoid | None = None, monoidal: bool = False,
                 converse: bool = False, rule: str = "", name: str = "") -> DynamicSetting:
    """A setting for one of the four functor kinds.

    ``kind="labeled"`` uses the time carrier as labels (the behavioral-LTS
    functor). ``converse`` implies ``monoidal``.
    """
    scale = scale or default_scale(metric)
    time = time or TimeMonoid.naturals(max(len(space), 2))
    F = {
        "identity": Identity(),
        "powerset": Powerset(),
        "findist": FinDist(),
        "labeled": time_labels(time),
    }[kind]
    monoidal = monoidal or converse
    return DynamicSetting(
        name=name or kind,
        time=time,
        space=space,
        scale=scale,
        metric=metric,
        clock=unit_clock(F, time),
        sigma=_sigma(F, scale, time, converse),
        forder=FOrder(F, scale, rule),
        monoidal=monoidal,
        converse=converse,
    )


def _line(n: int):
    E = FiniteSpace.range(n)
    d = Metric.absolute(E)
    return E, d, default_scale(d)


def discrete_setting(n: int = 8, horizon: int = 8, **kw) -> DynamicSetting:
    E, d, R = _line(n)
    return make_setting("identity", E, d, R, TimeMonoid.naturals(horizon),
                        name="discrete", **kw)


def graph_setting(n: int = 8, horizon: int = 8, **kw) -> DynamicSetting:
    E, d, R = _line(n)
    return make_setting("powerset", E, d, R, TimeMonoid.naturals(horizon), name="graph", **kw)


def markov_setting(n: int = 8, horizon: int = 8, **kw) -> DynamicSetting:
    E, d, R = _line(n)
    return make_setting("findist", E, d, R, TimeMonoid.naturals(horizon), name="markov", **kw)


def behavioral_lts_setting(n: int = 8, time: TimeMonoid | None = None,
                           monoidal: bool = False, **kw) -> DynamicSetting:
    E, d, R = _line(n)
    time = time or TimeMonoid.naturals(n)
    return make_setting("labeled", E, d, R, time, monoidal=monoidal,
                        name="behavioral-lts", **kw)


def bundled_settings() -> list[DynamicSetting]:
    return [
        discrete_setting(),
        discrete_setting(monoidal=True, converse=True),
        graph_setting(),
        graph_setting(converse=True),
        markov_setting(converse=True),
        behavioral_lts_setting(),
        behavioral_lts_setting(time=TimeMonoid.grid(Fraction(1, 2), 4)),
        behavioral_lts_setting(converse=True),
    ]


def halving_system(n: int = 8) -> Coalgebra:
    """``x -> floor(x / 2)`` on ``{0, ..., n-1}``."""
    E = FiniteSpace.range(n)
    return Coalgebra.from_map(Identity(), E, lambda x: x // 2)


def doubling_system(n: int = 8) -> Coalgebra:
    """``x -> min(2x, n-1)`` on ``{0, ..., n-1}``."""
    E = FiniteSpace.range(n)
    return Coalgebra.from_map(Identity(), E, lambda x: min(2 * x, n - 1))


def lts_of(phi: Flow) -> Coalgebra:
    return behavioral_lts(phi)
