import itertools

import pytest
from hypothesis import given

from lyapcoalg import (
    Coalgebra,
    Dist,
    FinDist,
    FiniteSpace,
    Identity,
    InputError,
    Labeled,
    Powerset,
    TimeMonoid,
    behavioral_lts,
    build_L,
    integral,
    is_flow,
    is_solution,
    is_system_morphism,
    is_T_complete,
    is_trajectory,
    stationary,
    tensor,
    unit_clock,
)
from lyapcoalg.systems import morphism_witness, time_labels

from strategies import endomaps

E8 = FiniteSpace.range(8)
T4 = TimeMonoid.naturals(4)
HALVING = Coalgebra.from_map(Identity(), E8, lambda x: x // 2)


def iterate(F, k, x):
    for _ in range(k):
        x = F(x)
    return x


class TestMorphisms:
    def test_identity_square(self):
        assert is_system_morphism(lambda x: x, HALVING, HALVING)

    def test_constant_map(self):
        zero = Coalgebra(Identity(), FiniteSpace((0,)), {0: 0})
        assert is_system_morphism(lambda x: 0, HALVING, zero)

    def test_saturating_shift_fails_with_witness(self):
        shift = lambda x: min(x + 1, 7)  # noqa: E731
        assert morphism_witness(shift, HALVING, HALVING) == 0

    def test_kind_mismatch(self):
        with pytest.raises(InputError):
            is_system_morphism(lambda x: x, HALVING, stationary(Powerset(), E8))


class TestClock:
    def test_kinds(self):
        assert unit_clock(Identity(), T4).dynamics == {0: 1, 1: 2, 2: 3, 3: 4}
        assert unit_clock(FinDist(), T4).dynamics[2] == Dist.dirac(3)
        lab = unit_clock(time_labels(T4), T4)
        assert lab.dynamics[1] == frozenset({(0, 1), (1, 2), (2, 3), (3, 4)})
        assert lab.window[3] == frozenset({0, 1})

    def test_labeled_clock_needs_time_labels(self):
        with pytest.raises(InputError):
            unit_clock(Labeled(FiniteSpace(("a",))), T4)


class TestTensor:
    @pytest.mark.parametrize("F", [Identity(), Powerset(), FinDist(),
                                   Labeled(FiniteSpace(("a", "b")))])
    def test_stationary_tensor(self, F):
        A, B = FiniteSpace.range(2), FiniteSpace(("u", "v", "w"))
        assert tensor(stationary(F, A), stationary(F, B)) == stationary(F, A.product(B))

    def test_identity_pairs(self):
        f = Coalgebra.from_map(Identity(), FiniteSpace.range(2), lambda x: 1 - x)
        g = Coalgebra.from_map(Identity(), FiniteSpace.range(3), lambda x: (x + 1) % 3)
        assert tensor(f, g).dynamics[(0, 2)] == (1, 0)

    @pytest.mark.parametrize("F", [Identity(), Powerset(), FinDist(max_denominator=2),
                                   Labeled(FiniteSpace(("a", "b")))])
    def test_associativity_up_to_reassociation(self, F):
        S = FiniteSpace.range(2)
        values = list(F.values(S))
        systems = [Coalgebra(F, S, dict(zip(S, vs))) for vs in itertools.product(values, repeat=2)]
        sample = systems[:: max(1, len(systems) // 6)]
        for f, g, h in itertools.product(sample, repeat=3):
            left, right = tensor(tensor(f, g), h), tensor(f, tensor(g, h))
            assoc = lambda p: (p[0][0], (p[0][1], p[1]))  # noqa: E731
            assert is_system_morphism(assoc, left, right)


class TestL:
    def test_identity(self):
        X = FiniteSpace(("x", "y"))
        L = build_L(unit_clock(Identity(), T4), X)
        assert L.dynamics[(2, "y")] == (3, "y")
        assert (4, "x") not in L.dynamics

    def test_findist(self):
        L = build_L(unit_clock(FinDist(), T4), FiniteSpace(("a",)))
        assert L.dynamics[(1, "a")] == Dist.dirac((2, "a"))

    def test_labeled(self):
        F = time_labels(T4)
        L = build_L(unit_clock(F, T4), FiniteSpace(("x",)))
        assert L.dynamics[(1, "x")] == frozenset((m, (1 + m, "x")) for m in range(4))

    @pytest.mark.parametrize("F", [Identity(), Powerset(), FinDist(), time_labels(T4)],
                             ids=["id", "pow", "dist", "lab"])
    def test_naturality(self, F):
        clock = unit_clock(F, T4)
        X, Y = FiniteSpace.range(2), FiniteSpace.range(3)
        for g in itertools.product(range(3), repeat=2):
            assert is_system_morphism(lambda p: (p[0], g[p[1]]), build_L(clock, X),
                                      build_L(clock, Y))


class TestTrajectories:
    clock = unit_clock(Identity(), T4)

    def test_constant_at_equilibrium(self):
        assert is_trajectory(lambda t: 0, HALVING, self.clock)

    def test_iterates_and_skips(self):
        F = HALVING.dynamics.__getitem__
        assert is_trajectory(lambda k: iterate(F, k, 7), HALVING, self.clock)
        assert not is_trajectory(lambda k: iterate(F, 2 * k, 7), HALVING, self.clock)

    def test_solutions(self):
        F = HALVING.dynamics.__getitem__
        assert is_solution(lambda k, x: iterate(F, k, x), HALVING, self.clock, E8)
        # shifted iterates still satisfy the square; only the initial condition is off
        shifted = lambda k, x: iterate(F, k + 1, x)  # noqa: E731
        assert is_solution(shifted, HALVING, self.clock, E8)
        assert not is_flow(shifted, T4, E8)
        skipping = lambda k, x: iterate(F, 2 * k, x)  # noqa: E731
        assert not is_solution(skipping, HALVING, self.clock, E8)
        assert is_solution(lambda k, x: x, stationary(Identity(), E8), self.clock, E8)

    @given(endomaps(max_n=5))
    def test_solution_restricts_to_trajectories(self, m):
        n, table = m
        E = FiniteSpace.range(n)
        f = Coalgebra(Identity(), E, dict(enumerate(table)))
        phi = lambda k, x: iterate(table.__getitem__, k, x)  # noqa: E731
        assert is_solution(phi, f, self.clock, E)
        for x0 in E:
            assert is_trajectory(lambda k: phi(k, x0), f, self.clock)


class TestCompleteness:
    def test_identity_always_complete(self):
        assert is_T_complete(HALVING, unit_clock(Identity(), T4)).complete

    def test_two_successors(self):
        F = time_labels(T4)
        E = FiniteSpace(("p", "q"))
        edges = {x: frozenset((t, x) for t in T4.carrier) for x in E}
        edges["p"] = edges["p"] | {(1, "q")}
        report = is_T_complete(Coalgebra(F, E, edges), unit_clock(F, T4))
        assert report.failures == [("p", "multiple-extensions")]

    def test_sink(self):
        f = Coalgebra(Powerset(), FiniteSpace.range(2), {0: frozenset({1}), 1: frozenset()})
        report = is_T_complete(f, unit_clock(Powerset(), T4))
        assert not report and report.failures == [(1, "no-extension")]

    def test_non_dirac(self):
        f = Coalgebra(FinDist(), FiniteSpace.range(2),
                      {0: Dist({0: "1/2", 1: "1/2"}), 1: Dist.dirac(1)})
        assert is_T_complete(f, unit_clock(FinDist(), T4)).failures == [
            (0, "multiple-extensions")]

    def test_incoherent_labels(self):
        # deterministic and total, but label 2 is not two steps of label 1
        F = time_labels(TimeMonoid.naturals(2))
        E = FiniteSpace.range(3)
        dyn = {x: frozenset({(0, x), (1, (x + 1) % 3), (2, x)}) for x in E}
        report = is_T_complete(Coalgebra(F, E, dyn), unit_clock(F, TimeMonoid.naturals(2)))
        assert not report.complete

    @pytest.mark.parametrize("kind", ["powerset", "findist", "labeled"])
    def test_local_criterion_matches_trajectory_count(self, kind):
        """Complete iff every start has exactly one trajectory, by enumeration."""
        T = TimeMonoid.naturals(2)
        E = FiniteSpace.range(2)
        if kind == "powerset":
            F = Powerset()
        elif kind == "findist":
            F = FinDist(max_denominator=2)
        else:
            F = time_labels(T)
        clock = unit_clock(F, T)
        values = list(F.values(E))
        for vs in itertools.product(values, repeat=len(E)):
            f = Coalgebra(F, E, dict(zip(E, vs)))
            counts = {x: 0 for x in E}
            for c in itertools.product(E, repeat=len(T.carrier)):
                if is_trajectory(lambda t: c[T.ticks(t)], f, clock):
                    counts[c[0]] += 1
            brute = all(v == 1 for v in counts.values())
            assert is_T_complete(f, clock).complete == brute, vs


class TestBehavioralLTS:
    phi = integral(HALVING, unit_clock(Identity(), TimeMonoid.naturals(8)))

    def test_edges(self):
        lts = behavioral_lts(self.phi)
        assert (1, 2) in lts.dynamics[5]
        assert all((0, x) in lts.dynamics[x] for x in E8)

    def test_composition_edges(self):
        lts = behavioral_lts(self.phi)
        for x in E8:
            for s, t in itertools.product(range(5), repeat=2):
                assert (s + t, self.phi(s + t, self.phi(0, x))) in lts.dynamics[x]

    @given(endomaps(max_n=6))
    def test_lts_of_flow_is_complete(self, m):
        n, table = m
        E = FiniteSpace.range(n)
        T = TimeMonoid.naturals(4)
        phi = integral(Coalgebra(Identity(), E, dict(enumerate(table))),
                       unit_clock(Identity(), T))
        lts = behavioral_lts(phi)
        assert is_T_complete(lts, unit_clock(time_labels(T), T)).complete
