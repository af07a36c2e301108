"""Stability settings, Lyapunov certificates and the brute-force oracle.

Class-K maps here are order automorphisms of a finite scale. A strictly
increasing self-map of a finite chain is necessarily the identity, so on
these scales "bounded by a class-K image of the norm" means "bounded by
the norm itself". The greedy extension below is written for the general
monotone-completion problem and simply reports that outcome.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    ClassK,
    FiniteSpace,
    InputError,
    MeasureScale,
    Metric,
    StateFunction,
    TimeMonoid,
    ValidationReport,
    classk_validate,
    metric_validate,
    norm_to_point,
)
from .flows import (
    Flow,
    IncompleteSystemError,
    equilibrium_check,
    equilibrium_check_sys,
    integral,
)
from .functors import (
    ONE,
    FOrder,
    Functor,
    Labeled,
    check_monoidal_laws,
    forder_violations,
    representable_values,
)
from .systems import (
    Coalgebra,
    UnitClock,
    build_L,
    is_solution,
    is_T_complete,
    stationary,
    unit_clock,
)

__all__ = [
    "DynamicSetting",
    "LawSizes",
    "Certificate",
    "Verdict",
    "PDReport",
    "ComparisonReport",
    "CheckResult",
    "CertificateReport",
    "PreconditionError",
    "validate_setting",
    "extend_to_classk",
    "positive_definite_check",
    "flow_decrescent_check",
    "flow_decrescent_failures",
    "system_decrescent_check",
    "system_decrescent_failures",
    "comparison_lemma_check",
    "stability_oracle",
    "converse_construct",
    "certify",
]


class PreconditionError(InputError):
    pass


@dataclass(frozen=True)
class DynamicSetting:
    """Base data plus clock, stable system ``sigma`` on ``R`` and order on ``F R``.

    ``monoidal`` turns on the laxator/stationary axioms and the generalized
    comparison lemma; ``converse`` additionally the unit, completeness and
    order-preservation axioms (and requires ``sigma`` to be stationary).
    """

    name: str
    time: TimeMonoid
    space: FiniteSpace
    scale: MeasureScale
    metric: Metric
    clock: UnitClock
    sigma: Coalgebra
    forder: FOrder
    monoidal: bool = False
    converse: bool = False

    @property
    def functor(self) -> Functor:
        return self.clock.functor


@dataclass(frozen=True)
class LawSizes:
    max_size: int = 2
    scale_values: int = 3
    labels: int = 2
    curves: int = 200
    seed: int = 0


@dataclass(frozen=True)
class Certificate:
    V: StateFunction
    lower: ClassK | None = None
    upper: ClassK | None = None


@dataclass
class Verdict:
    status: str  # "stable" | "unstable" | "unknown"
    witness: ClassK | None = None
    counterexample: object = None
    obstruction: str = ""

    @property
    def stable(self) -> bool:
        return self.status == "stable"


@dataclass
class PDReport:
    ok: bool
    lower: ClassK | None = None
    upper: ClassK | None = None
    obstruction: str = ""
    witness: object = None
    searched: bool = False


@dataclass
class ComparisonReport:
    checked: int = 0
    lhs_held: int = 0
    vacuous: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


# -- settings ---------------------------------------------------------------


def _small_functor(F: Functor, labels: int) -> Functor:
    if isinstance(F, Labeled):
        return Labeled(FiniteSpace(F.labels.labels[:labels]))
    return F


def _show(value) -> str:
    """Readable form of nested values with rationals as ``p/q``."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(_show(v) for v in value) + ")"
    if isinstance(value, frozenset):
        return "{" + ", ".join(sorted(_show(v) for v in value)) + "}"
    return repr(value)


def validate_setting(s: DynamicSetting, sizes: LawSizes = LawSizes()) -> ValidationReport:
    """Run every axiom check the setting's flags call for.

    Law suites on labeled functors run on the first ``sizes.labels`` labels
    and order laws on the first ``sizes.scale_values`` scale values; both
    are bounded checks, recorded as notes.
    """
    report = ValidationReport()
    F = s.functor
    report.extend(metric_validate(s.metric, s.space, s.scale), "S4: ")
    report.violations.extend("S2: " + v for v in s.time.check_laws())

    # D1
    if s.clock.space != s.time.space:
        report.violations.append("D1: clock space is not the time carrier")
    else:
        expected = unit_clock(F, s.time)
        for t in s.time.carrier:
            if s.clock.dynamics.get(t) != expected.dynamics.get(t):
                report.violations.append(f"D1: clock differs from the unit rule at t={t}")
                break
    # D2
    if s.sigma.space != s.scale.space or s.sigma.functor != F:
        report.violations.append("D2: stable system must live on the scale with the same functor")
    elif not s.sigma.total:
        report.violations.append("D2: stable system is partial")
    # D3
    if s.forder.functor != F:
        report.violations.append("D3: order is for a different functor")
    small_scale = MeasureScale(s.scale.values[: sizes.scale_values])
    values = representable_values(F, s.scale, sizes.scale_values + 1, sizes.labels)
    for law, witness in forder_violations(s.forder, values):
        report.violations.append(f"D3: order fails {law}, witness {_show(witness)}")
        break
    report.notes.append(
        f"D3 checked on {len(values)} values over the first "
        f"{min(len(s.scale), sizes.scale_values + 1)} scale values"
    )
    # D4 / D4'
    comparison = comparison_lemma_check(s, sizes.curves, sizes.seed)
    for failure in comparison.failures[:3]:
        report.violations.append(f"D4: comparison lemma fails for curve {failure}")
    report.notes.append(
        f"D4: {comparison.checked} curves, {comparison.lhs_held} with hypothesis, "
        f"{comparison.vacuous} vacuous"
    )
    if s.monoidal or s.converse:
        small = _small_functor(F, sizes.labels)
        order = FOrder(small, small_scale, s.forder.rule, s.forder.relation)
        laws = check_monoidal_laws(small, sizes.max_size, small_scale, order)
        wanted = ["D5", "D6"] + (["D7", "D9"] if s.converse else [])
        for law in wanted:
            if not laws[law].passed:
                report.violations.append(f"{law}: fails, witness {_show(laws[law].witness)}")
        report.notes.append(f"{', '.join(wanted)} checked exhaustively up to size {sizes.max_size}")
    if s.converse:
        d8 = is_T_complete(stationary(F, ONE), s.clock)
        if not d8.complete:
            report.violations.append(f"D8: stationary system on 1 is not complete {d8.failures}")
        if s.sigma != stationary(F, s.scale.space):
            report.violations.append("D2: converse settings need the stationary system on R")
    report.notes.append("pointwise-induced order on R: satisfied by construction")
    report.notes.append("suprema: finite chain, all finite suprema exist")
    return report


# -- class K ------------------------------------------------------------------


def extend_to_classk(scale: MeasureScale, floor: dict | None = None,
                     ceiling: dict | None = None):
    """Greedily build a class-K map ``a`` with ``floor[r] <= a(r) <= ceiling[r]``.

    Returns ``(alpha, None, None)`` on success and ``(None, r_fail, r_cause)``
    otherwise, where ``r_cause`` is the last scale value whose floor pushed
    the chain upward before the failure at ``r_fail``.
    """
    floor, ceiling = floor or {}, ceiling or {}
    values = scale.values
    table = {}
    prev = -1
    cause = None
    for r in values:
        lo = floor.get(r, scale.zero)
        j = prev + 1
        while j < len(values) and values[j] < lo:
            j += 1
        if r == scale.zero and j != 0:
            return None, r, r
        if j >= len(values):
            return None, r, cause if cause is not None else r
        if j > prev + 1:
            cause = r
        if r in ceiling and values[j] > ceiling[r]:
            return None, r, r
        table[r] = values[j]
        prev = j
    return ClassK(table), None, None


def positive_definite_check(V: StateFunction, xstar, d: Metric, scale: MeasureScale,
                            lower: ClassK | None = None,
                            upper: ClassK | None = None) -> PDReport:
    """Sandwich ``V`` between class-K images of the norm to ``x*``.

    Missing bounds are searched for from the tightest monotone envelopes of
    ``V`` as a function of the norm.
    """
    outside = V.outside(scale)
    if outside:
        return PDReport(False, obstruction=f"V({outside[0]!r}) is not a scale value",
                        witness=outside[0])
    norm = norm_to_point(d, xstar)
    searched = lower is None or upper is None
    realized = sorted(set(norm.values()))
    if lower is None:
        ceiling = {r: min(V[x] for x in V if norm[x] >= r) for r in realized}
        lower, r_fail, _ = extend_to_classk(scale, ceiling=ceiling)
        if lower is None:
            y = min((x for x in V if norm[x] >= r_fail), key=lambda x: (V[x], norm[x]))
            return PDReport(False, obstruction=(
                f"no class-K lower bound: need a(|{y!r}|)=a({norm[y]}) <= V={V[y]}"),
                witness=y, searched=True)
    if upper is None:
        floor = {r: max(V[x] for x in V if norm[x] <= r) for r in realized}
        upper, r_fail, r_cause = extend_to_classk(scale, floor=floor)
        if upper is None:
            y = max((x for x in V if norm[x] <= r_cause), key=lambda x: (V[x], -norm[x]))
            return PDReport(False, lower=lower, obstruction=(
                f"no class-K upper bound: envelope({r_cause})={floor.get(r_cause)} admits "
                f"no strictly increasing bijective extension"), witness=y, searched=True)
    for name, alpha in (("lower", lower), ("upper", upper)):
        if not classk_validate(alpha, scale):
            return PDReport(False, lower, upper, f"{name} bound is not class K")
    for x in V:
        if not lower(norm[x]) <= V[x] <= upper(norm[x]):
            return PDReport(False, lower, upper,
                            f"sandwich fails at {x!r}: {lower(norm[x])} <= {V[x]} "
                            f"<= {upper(norm[x])} is false", witness=x, searched=searched)
    return PDReport(True, lower, upper, searched=searched)


# -- decrescence --------------------------------------------------------------


def flow_decrescent_failures(V: StateFunction, phi: Flow) -> list[tuple]:
    """``(x, t, y)`` with ``y = phi(t, x)`` and ``V(y) > V(x)``, over all time."""
    out = []
    for x in phi.space:
        orb = phi.orbit(x)
        for k, y in enumerate(orb.states):
            if V[y] > V[x]:
                out.append((x, phi.time.at(k), y))
                break
    return out


def flow_decrescent_check(V: StateFunction, phi: Flow) -> bool:
    return not flow_decrescent_failures(V, phi)


def system_decrescent_failures(V: StateFunction, f: Coalgebra, s: DynamicSetting) -> list:
    """States where ``F V (f(x)) <= sigma(V(x))`` fails in the setting's order."""
    F = f.functor
    if F != s.functor:
        raise InputError("system and setting use different functors")
    out = []
    for x, v in f.dynamics.items():
        if V[x] not in s.sigma.dynamics:
            raise InputError(f"V({x!r}) = {V[x]} is not a scale value")
        if not s.forder.leq(F.fmap(V.__getitem__, v), s.sigma.dynamics[V[x]]):
            out.append(x)
    return out


def system_decrescent_check(V: StateFunction, f: Coalgebra, s: DynamicSetting) -> bool:
    return not system_decrescent_failures(V, f, s)


# -- comparison lemma ---------------------------------------------------------


def _curve_lhs(s: DynamicSetting, gamma: dict) -> bool:
    F, order = s.functor, s.forder
    look = gamma.__getitem__
    for t, v in s.clock.dynamics.items():
        if not order.leq(F.fmap(look, v), s.sigma.dynamics[gamma[t]]):
            return False
    return True


def _curve_lhs_general(s: DynamicSetting, L: Coalgebra, gamma: dict) -> bool:
    F, order = s.functor, s.forder
    look = gamma.__getitem__
    for p, v in L.dynamics.items():
        if not order.leq(F.fmap(look, v), F.unit(gamma[p])):
            return False
    return True


def _random_curve(rng: random.Random, scale, n: int, monotone: bool) -> list:
    picks = [rng.choice(scale) for _ in range(n)]
    return sorted(picks, reverse=True) if monotone else picks


def comparison_lemma_check(s: DynamicSetting, n: int = 1000, seed: int = 0,
                           n_random: int | None = None) -> ComparisonReport:
    """Test the comparison lemma on seeded curves.

    ``n`` non-increasing curves ``T -> R`` plus ``n_random`` arbitrary ones
    (default ``n // 4``); in monoidal settings each curve is also paired
    with a second one to form ``T x {0, 1} -> R`` for the generalized lemma.
    Curves whose hypothesis fails count as vacuous.
    """
    rng = random.Random(seed)
    if n_random is None:
        n_random = n // 4
    carrier = s.time.carrier
    scale = s.scale.values
    report = ComparisonReport()
    A = FiniteSpace.range(2)
    L = build_L(s.clock, A) if s.monoidal else None
    for i in range(n + n_random):
        monotone = i < n
        gamma = dict(zip(carrier, _random_curve(rng, scale, len(carrier), monotone)))
        report.checked += 1
        if _curve_lhs(s, gamma):
            report.lhs_held += 1
            if not all(gamma[t] <= gamma[carrier[0]] for t in carrier):
                report.failures.append(("D4", tuple(gamma.values())))
        else:
            report.vacuous += 1
        if L is not None:
            other = dict(zip(carrier, _random_curve(rng, scale, len(carrier), monotone)))
            g2 = {(t, a): (gamma if a == 0 else other)[t] for t in carrier for a in A}
            report.checked += 1
            if _curve_lhs_general(s, L, g2):
                report.lhs_held += 1
                if not all(g2[(t, a)] <= g2[(carrier[0], a)] for t, a in g2):
                    report.failures.append(("D4'", tuple(g2.items())))
            else:
                report.vacuous += 1
    return report


# -- oracle and converse -----------------------------------------------------


def _orbit_sup(phi: Flow, norm: StateFunction) -> dict:
    return {x: max(norm[y] for y in phi.orbit(x).states) for x in phi.space}


def stability_oracle(phi: Flow, xstar, d: Metric, scale: MeasureScale) -> Verdict:
    """Decide stability of ``x*`` from the exact orbit suprema of the norm."""
    if not equilibrium_check(xstar, phi):
        raise PreconditionError(f"{xstar!r} is not an equilibrium of the flow")
    norm = norm_to_point(d, xstar)
    sup = _orbit_sup(phi, norm)
    realized = sorted(set(norm.values()))
    envelope = {r: max(sup[x] for x in phi.space if norm[x] <= r) for r in realized}
    alpha, r_fail, r_cause = extend_to_classk(scale, floor=envelope)
    if alpha is None:
        bad = max((x for x in phi.space if norm[x] <= r_cause), key=lambda x: (sup[x], -norm[x]))
        return Verdict("unstable", counterexample=bad, obstruction=(
            f"envelope({r_cause})={envelope[r_cause]} admits no strictly increasing "
            f"bijective extension"))
    return Verdict("stable", witness=alpha)


def converse_construct(phi: Flow, xstar, d: Metric) -> StateFunction:
    """``V(x) = max`` of the norm to ``x*`` over the orbit of ``x``."""
    norm = norm_to_point(d, xstar)
    return StateFunction(phi.space, _orbit_sup(phi, norm))


# -- certification pipeline --------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    clause: str
    detail: str = ""


@dataclass
class CertificateReport:
    certified: bool
    status: str
    V: StateFunction | None
    checks: list = field(default_factory=list)
    oracle: Verdict | None = None
    consistent: bool = True
    second_pass: CertificateReport | None = None
    completeness: object = None

    def check(self, name: str) -> CheckResult | None:
        for c in self.checks:
            if c.name == name:
                return c
        return None


CLAUSE_SYSTEMS = "Lyapunov theorem for systems: positive definite + lax decrescent square"
CLAUSE_FLOWS = "Lyapunov theorem for flows: positive definite + decrescent along the flow"
CLAUSE_TRAJ = "Lyapunov theorem on trajectories: system decrescent implies flow decrescent"
CLAUSE_STABLE = "definition of stability: |phi(t,x)| <= alpha(|x|)"
CLAUSE_EQ = "definition of equilibrium"
CLAUSE_CONVERSE = "converse theorem: V = sup over time of the norm"


def certify(system, xstar, setting: DynamicSetting, certificate: Certificate | None = None,
            flow: Flow | None = None, crosscheck: bool = False,
            require_flow: bool = False, converse_fallback: bool = True,
            validate: bool = False) -> CertificateReport:
    """Check a Lyapunov certificate for a system or a flow.

    ``system`` is a :class:`Coalgebra` or a :class:`Flow`. Without a
    certificate the converse candidate is used; without bounds they are
    searched for. A coalgebra that is T-complete is also checked through its
    integral. When the certificate is rejected and ``converse_fallback`` is
    set, a second pass runs with the converse candidate.
    """
    if validate:
        vr = validate_setting(setting)
        if not vr.ok:
            raise PreconditionError(f"setting invalid: {vr.violations[:3]}")
    coalgebra = system if isinstance(system, Coalgebra) else None
    if isinstance(system, Flow):
        if flow is not None and flow != system:
            raise InputError("refusing: two different flows supplied")
        flow = system
    elif coalgebra is None:
        raise InputError(f"cannot certify {type(system).__name__}")
    completeness = None
    if coalgebra is not None:
        if flow is not None and not is_solution(flow, coalgebra, setting.clock):
            raise InputError("refusing: the flow is not a solution of the system")
        completeness = is_T_complete(coalgebra, setting.clock)
        if flow is None and completeness.complete:
            flow = integral(coalgebra, setting.clock)
        if flow is None and (require_flow or crosscheck or certificate is None):
            raise IncompleteSystemError(completeness)

    checks = []
    if coalgebra is not None:
        eq = equilibrium_check_sys(xstar, coalgebra)
    else:
        eq = equilibrium_check(xstar, flow)
    checks.append(CheckResult("equilibrium", eq, CLAUSE_EQ))

    mode = "given"
    if certificate is None:
        certificate = Certificate(converse_construct(flow, xstar, setting.metric))
        mode = "converse"
    V = certificate.V
    pd = positive_definite_check(V, xstar, setting.metric, setting.scale,
                                 certificate.lower, certificate.upper)
    checks.append(CheckResult("positive_definite", pd.ok, "definition of positive definite",
                              pd.obstruction))
    decrescent = True
    if coalgebra is not None:
        bad = system_decrescent_failures(V, coalgebra, setting)
        decrescent = not bad
        checks.append(CheckResult("system_decrescent", not bad, CLAUSE_SYSTEMS,
                                  f"fails at {bad[0]!r}" if bad else ""))
    if flow is not None:
        bad_flow = flow_decrescent_failures(V, flow)
        checks.append(CheckResult("flow_decrescent", not bad_flow,
                                  CLAUSE_TRAJ if coalgebra is not None else CLAUSE_FLOWS,
                                  f"fails at x={bad_flow[0][0]!r}, t={bad_flow[0][1]}"
                                  if bad_flow else ""))
        if coalgebra is None:
            decrescent = not bad_flow
    certified = eq and pd.ok and decrescent
    consistent = True
    if coalgebra is not None and flow is not None and decrescent:
        consistent = check_ok(checks, "flow_decrescent")
    oracle = None
    if crosscheck and eq:
        oracle = stability_oracle(flow, xstar, setting.metric, setting.scale)
        checks.append(CheckResult("oracle", oracle.stable, CLAUSE_STABLE, oracle.obstruction))
        if certified and not oracle.stable:
            consistent = False
    if certified:
        status = f"certified ({mode} V): x* is stable"
    elif not eq:
        status = "rejected: x* is not an equilibrium"
    else:
        status = "certificate rejected, stability undetermined"
    report = CertificateReport(certified, status, V, checks, oracle, consistent,
                               completeness=completeness)
    if not certified and eq and mode == "given" and converse_fallback and flow is not None:
        report.second_pass = certify(system, xstar, setting, None, flow if coalgebra else None,
                                     crosscheck, require_flow, False)
        report.checks.append(CheckResult("converse_pass", report.second_pass.certified,
                                         CLAUSE_CONVERSE, report.second_pass.status))
    return report


def check_ok(checks: list, name: str) -> bool:
    return all(c.passed for c in checks if c.name == name)
