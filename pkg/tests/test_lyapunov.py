import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lyapcoalg import (
    Certificate,
    ClassK,
    Coalgebra,
    Dist,
    FiniteSpace,
    Flow,
    FOrder,
    Identity,
    IncompleteSystemError,
    InputError,
    MeasureScale,
    Metric,
    PreconditionError,
    StateFunction,
    TimeMonoid,
    behavioral_lts,
    certify,
    classk_validate,
    comparison_lemma_check,
    converse_construct,
    flow_decrescent_check,
    integral,
    norm_to_point,
    positive_definite_check,
    stability_oracle,
    stationary,
    system_decrescent_check,
    validate_setting,
)
from lyapcoalg.lyapunov import DynamicSetting, LawSizes, extend_to_classk
from lyapcoalg.settings import (
    behavioral_lts_setting,
    bundled_settings,
    discrete_setting,
    doubling_system,
    graph_setting,
    halving_system,
    make_setting,
    markov_setting,
)

from strategies import endomaps, naive_stable, random_metric

S = discrete_setting()
E8 = S.space
NORM = norm_to_point(S.metric, 0)
HALVING = halving_system()
DOUBLING = doubling_system()
PHI_HALF = integral(HALVING, S.clock)
PHI_DOUBLE = integral(DOUBLING, S.clock)
IDENT = Flow.from_step(S.time, E8, lambda x: x)


class TestValidateSetting:
    @pytest.mark.parametrize("s", bundled_settings(), ids=lambda s: f"{s.name}-{s.converse}")
    def test_bundled_settings_are_valid(self, s):
        report = validate_setting(s, LawSizes(curves=100))
        assert report.ok, report.violations
        assert any("by construction" in n for n in report.notes)

    def test_non_transitive_order_is_reported(self):
        chain = {(0, 1), (1, 2)}
        bad = FOrder(S.functor, S.scale, relation=lambda u, v: u == v or (u, v) in chain)
        s = DynamicSetting(**{**S.__dict__, "forder": bad})
        report = validate_setting(s, LawSizes(curves=20))
        assert not report.ok
        assert any("transitivity" in v and "(0, 1, 2)" in v for v in report.violations)

    def test_wrong_clock_and_sigma(self):
        wrong_clock = Coalgebra(Identity(), S.time.space, {t: t for t in S.time.carrier})
        from lyapcoalg.systems import UnitClock
        clock = UnitClock(Identity(), S.time.space, wrong_clock.dynamics, None, S.time)
        s = DynamicSetting(**{**S.__dict__, "clock": clock})
        assert any(v.startswith("D1") for v in validate_setting(s, LawSizes(curves=5)).violations)
        conv = discrete_setting(converse=True)
        shifted = Coalgebra.from_map(Identity(), conv.scale.space,
                                     lambda r: conv.scale.values[max(conv.scale.position(r) - 1, 0)])
        s = DynamicSetting(**{**conv.__dict__, "sigma": shifted})
        assert any("stationary" in v for v in validate_setting(s, LawSizes(curves=5)).violations)

    def test_broken_stable_system_breaks_comparison_lemma(self):
        # sigma allowing growth makes the comparison lemma fail
        up = Coalgebra.from_map(Identity(), S.scale.space,
                                lambda r: S.scale.values[min(S.scale.position(r) + 1, 7)])
        s = DynamicSetting(**{**S.__dict__, "sigma": up})
        report = comparison_lemma_check(s, n=50, n_random=200, seed=1)
        assert report.failures


class TestPositiveDefinite:
    def test_norm_has_identity_bounds(self):
        pd = positive_definite_check(NORM, 0, S.metric, S.scale)
        assert pd.ok and pd.lower == ClassK.identity(S.scale) == pd.upper

    def test_non_bijective_upper_bound_is_rejected(self):
        R = MeasureScale(tuple(range(15)))
        doubled = ClassK({r: min(2 * r, 14) for r in R})
        pd = positive_definite_check(NORM, 0, S.metric, R, ClassK.identity(R), doubled)
        assert not pd.ok and "upper bound is not class K" in pd.obstruction

    def test_vanishing_away_from_equilibrium(self):
        V = StateFunction(E8, lambda x: 0 if x == 3 else x)
        pd = positive_definite_check(V, 0, S.metric, S.scale)
        assert not pd.ok and pd.witness == 3
        assert "no class-K lower bound" in pd.obstruction

    def test_too_steep_candidate(self):
        V = StateFunction(E8, lambda x: min(2 * x, 7))
        pd = positive_definite_check(V, 0, S.metric, S.scale)
        assert not pd.ok and "no strictly increasing bijective extension" in pd.obstruction

    def test_given_bounds_sandwich(self):
        ident = ClassK.identity(S.scale)
        assert positive_definite_check(NORM, 0, S.metric, S.scale, ident, ident).ok
        V = StateFunction(E8, lambda x: max(x - 1, 0))
        assert not positive_definite_check(V, 0, S.metric, S.scale, ident, ident).ok

    def test_value_outside_scale(self):
        V = StateFunction(E8, lambda x: Fraction(x, 2))
        assert not positive_definite_check(V, 0, S.metric, S.scale).ok


def test_greedy_extension():
    R = MeasureScale((0, 1, 2, 3))
    alpha, fail, cause = extend_to_classk(R, floor={1: 2})
    assert alpha is None and cause == 1
    alpha, _, _ = extend_to_classk(R, floor={1: 1, 3: 3})
    assert alpha == ClassK.identity(R)
    assert extend_to_classk(R, floor={0: 1})[0] is None


class TestDecrescent:
    def test_flow_examples(self):
        assert flow_decrescent_check(NORM, PHI_HALF)
        assert flow_decrescent_check(StateFunction(E8, lambda x: 7 - x), IDENT)
        assert not flow_decrescent_check(NORM, PHI_DOUBLE)
        from lyapcoalg.lyapunov import flow_decrescent_failures
        assert flow_decrescent_failures(NORM, PHI_DOUBLE)[0] == (1, 1, 2)

    @given(endomaps(max_n=6), st.lists(st.integers(0, 5), min_size=6, max_size=6))
    def test_identity_kind_reduces_to_difference(self, m, vals):
        n, table = m
        E = FiniteSpace.range(n)
        s = make_setting("identity", E, Metric.absolute(E), MeasureScale(tuple(range(6))))
        V = StateFunction(E, dict(zip(E, vals)))
        f = Coalgebra(Identity(), E, dict(enumerate(table)))
        assert system_decrescent_check(V, f, s) == all(V[table[x]] <= V[x] for x in E)

    @given(endomaps(max_n=5), st.lists(st.integers(0, 4), min_size=5, max_size=5))
    def test_lts_kind_reduces_to_flow_check(self, m, vals):
        n, table = m
        s = behavioral_lts_setting(5)
        E = FiniteSpace.range(n)
        phi = Flow.from_step(s.time, E, table.__getitem__)
        V = StateFunction(E, dict(zip(E, vals)))
        lts = behavioral_lts(phi)
        s = DynamicSetting(**{**s.__dict__, "space": E})
        assert system_decrescent_check(V, lts, s) == flow_decrescent_check(V, phi)

    @pytest.mark.parametrize("s", [discrete_setting(converse=True), graph_setting(converse=True),
                                   markov_setting(converse=True),
                                   behavioral_lts_setting(converse=True)],
                             ids=["id", "pow", "dist", "lab"])
    def test_stationary_is_decrescent_for_every_V(self, s):
        rng = random.Random(3)
        f = stationary(s.functor, s.space)
        for _ in range(20):
            V = StateFunction(s.space, {x: rng.choice(s.scale.values) for x in s.space})
            assert system_decrescent_check(V, f, s)

    def test_graph_and_markov_kinds(self):
        g = graph_setting(4, 4)
        E = g.space
        V = StateFunction(E, lambda x: x)
        down = Coalgebra(g.functor, E, {x: frozenset({0, x // 2}) for x in E})
        up = Coalgebra(g.functor, E, {x: frozenset({0, min(x + 1, 3)}) for x in E})
        assert system_decrescent_check(V, down, g) and not system_decrescent_check(V, up, g)
        mk = markov_setting(4, 4)
        mix = Coalgebra(mk.functor, E, {x: Dist({0: "1/2", x: "1/2"}) if x else Dist.dirac(0)
                                        for x in E})
        leak = Coalgebra(mk.functor, E, {x: Dist({0: "1/2", min(x + 1, 3): "1/2"}) for x in E})
        assert system_decrescent_check(V, mix, mk) and not system_decrescent_check(V, leak, mk)

    def test_functor_mismatch(self):
        with pytest.raises(InputError):
            system_decrescent_check(NORM, stationary(graph_setting().functor, E8), S)


class TestComparisonLemma:
    def test_monotone_curves_hold(self):
        report = comparison_lemma_check(S, n=300, n_random=0, seed=0)
        assert report.ok and report.lhs_held == report.checked

    def test_increasing_curves_are_vacuous(self):
        report = comparison_lemma_check(S, n=0, n_random=300, seed=0)
        assert report.ok and report.vacuous > 0
        assert report.lhs_held + report.vacuous == report.checked

    def test_monoidal_form_is_exercised(self):
        s = discrete_setting(monoidal=True)
        report = comparison_lemma_check(s, n=100, seed=0)
        assert report.ok and report.checked == 2 * 125


class TestOracle:
    def test_halving_stable(self):
        v = stability_oracle(PHI_HALF, 0, S.metric, S.scale)
        assert v.stable and v.witness == ClassK.identity(S.scale)
        assert classk_validate(v.witness, S.scale)

    def test_doubling_unstable(self):
        v = stability_oracle(PHI_DOUBLE, 0, S.metric, S.scale)
        assert v.status == "unstable" and v.counterexample == 1
        assert v.obstruction == "envelope(1)=7 admits no strictly increasing bijective extension"

    def test_identity_flow(self):
        assert stability_oracle(IDENT, 4, S.metric, S.scale).stable

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            stability_oracle(PHI_HALF, 3, S.metric, S.scale)


class TestConverse:
    def test_halving_and_identity(self):
        assert converse_construct(PHI_HALF, 0, S.metric) == NORM
        assert converse_construct(IDENT, 0, S.metric) == NORM

    def test_swap(self):
        E = FiniteSpace(("a", "b", "c"))
        d = Metric(E, {("a", "a"): 0, ("b", "b"): 0, ("c", "c"): 0, ("a", "b"): 1,
                       ("b", "a"): 1, ("a", "c"): 1, ("c", "a"): 1, ("b", "c"): 2,
                       ("c", "b"): 2})
        phi = Flow.from_step(TimeMonoid.naturals(3), E, {"a": "b", "b": "a", "c": "c"})
        V = converse_construct(phi, "c", d)
        assert (V["a"], V["b"], V["c"]) == (2, 2, 0)


class TestCertify:
    def test_halving(self):
        report = certify(HALVING, 0, S, Certificate(NORM), crosscheck=True)
        assert report.certified and report.oracle.stable and report.consistent
        assert "systems" in report.check("system_decrescent").clause

    def test_doubling(self):
        report = certify(DOUBLING, 0, S, Certificate(NORM), crosscheck=True)
        assert not report.certified and report.consistent
        assert report.check("system_decrescent").detail == "fails at 1"
        assert report.oracle.status == "unstable"

    def test_two_pass(self):
        V = StateFunction(E8, lambda x: 0 if x == 3 else x)
        report = certify(HALVING, 0, S, Certificate(V))
        assert report.status == "certificate rejected, stability undetermined"
        assert report.second_pass.certified

    def test_bound_search_mode(self):
        report = certify(HALVING, 0, S)
        assert report.certified and report.V == NORM

    def test_flow_only(self):
        report = certify(PHI_HALF, 0, S, Certificate(NORM))
        assert report.certified and report.check("flow_decrescent").passed
        assert report.check("system_decrescent") is None

    def test_refuses_incompatible_flow(self):
        with pytest.raises(InputError, match="refusing"):
            certify(HALVING, 0, S, Certificate(NORM), flow=PHI_DOUBLE)

    def test_incomplete_system(self):
        g = graph_setting(4, 4)
        f = Coalgebra(g.functor, g.space, {x: frozenset({0, x // 2}) for x in g.space})
        V = StateFunction(g.space, lambda x: x)
        assert certify(f, 0, g, Certificate(V)).certified
        with pytest.raises(IncompleteSystemError):
            certify(f, 0, g, Certificate(V), require_flow=True)
        with pytest.raises(IncompleteSystemError):
            certify(f, 0, g)

    def test_non_equilibrium(self):
        report = certify(HALVING, 5, S, Certificate(NORM))
        assert not report.certified and "not an equilibrium" in report.status

    def test_validate_flag(self):
        assert certify(HALVING, 0, S, Certificate(NORM), validate=True).certified


# -- theorem-level invariants on generated instances --------------------------


def _instance(rng: random.Random, n: int):
    E = FiniteSpace.range(n)
    xstar = rng.randrange(n)
    table = [rng.randrange(n) for _ in range(n)]
    table[xstar] = xstar
    d = random_metric(rng, E) if rng.random() < 0.5 else Metric.absolute(E)
    s = make_setting("identity", E, d, time=TimeMonoid.naturals(n))
    return s, Coalgebra(Identity(), E, dict(enumerate(table))), xstar, table


@given(st.integers(0, 10**6), st.integers(1, 7))
def test_soundness_and_converse(seed, n):
    rng = random.Random(seed)
    s, f, xstar, table = _instance(rng, n)
    phi = integral(f, s.clock)
    verdict = stability_oracle(phi, xstar, s.metric, s.scale)
    norm = norm_to_point(s.metric, xstar)
    assert verdict.stable == naive_stable(table.__getitem__, xstar, norm, n)
    V = StateFunction(s.space, {x: rng.choice(s.scale.values) for x in s.space})
    if certify(f, xstar, s, Certificate(V), converse_fallback=False).certified:
        assert verdict.stable
    if verdict.stable:
        W = converse_construct(phi, xstar, s.metric)
        assert positive_definite_check(W, xstar, s.metric, s.scale).ok
        assert flow_decrescent_check(W, phi)
        assert system_decrescent_check(W, f, s)


@given(st.integers(0, 10**6), st.integers(1, 7))
def test_trajectory_theorem_and_monotone_orbits(seed, n):
    rng = random.Random(seed)
    s, f, xstar, _ = _instance(rng, n)
    phi = integral(f, s.clock)
    V = StateFunction(s.space, {x: rng.choice(s.scale.values[:3]) for x in s.space})
    if system_decrescent_check(V, f, s):
        assert flow_decrescent_check(V, phi)
        for x in s.space:
            values = [V[y] for y in phi.orbit(x).states]
            assert values == sorted(values, reverse=True)


@given(st.integers(0, 10**6), st.integers(2, 6))
def test_rescaling_invariance(seed, n):
    rng = random.Random(seed)
    s, f, xstar, _ = _instance(rng, n)
    phi = integral(f, s.clock)
    V = StateFunction(s.space, {x: rng.choice(s.scale.values) for x in s.space})
    pd = positive_definite_check(V, xstar, s.metric, s.scale).ok
    dec = system_decrescent_check(V, f, s)
    # every class-K map of the scale (found by enumeration) preserves both verdicts
    for perm in itertools.permutations(s.scale.values):
        alpha = ClassK(dict(zip(s.scale.values, perm)))
        if classk_validate(alpha, s.scale):
            W = V.then(alpha)
            assert positive_definite_check(W, xstar, s.metric, s.scale).ok == pd
            assert system_decrescent_check(W, f, s) == dec
        if len(s.scale) > 5:
            break
    # decrescence only sees the order, so any strictly increasing rescaling keeps it
    stretched = V.then(lambda v: 3 * v + v * v)
    assert flow_decrescent_check(stretched, phi) == flow_decrescent_check(V, phi)
