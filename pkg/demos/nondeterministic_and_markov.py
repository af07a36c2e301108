"""The same check for branching graphs and Markov chains.

Run with ``python3 demos/nondeterministic_and_markov.py``.
"""

from fractions import Fraction

from lyapcoalg import Certificate, Coalgebra, Dist, StateFunction, certify
from lyapcoalg import system_decrescent_failures
from lyapcoalg.settings import graph_setting, markov_setting


def main():
    g = graph_setting(4, 4)
    V = StateFunction(g.space, lambda x: x)

    # Every successor of x sits no higher than x, so V decreases on all branches.
    down = Coalgebra(g.functor, g.space, {x: frozenset({0, x // 2}) for x in g.space})
    print("graph, successors {0, x // 2}:", certify(down, 0, g, Certificate(V)).status)

    # One branch climbing from 2 to 3 is enough to break the certificate.
    up = Coalgebra(g.functor, g.space, {**down.dynamics, 2: frozenset({1, 3})})
    print("graph, 2 may jump to 3: failures at", system_decrescent_failures(V, up, g))

    m = markov_setting(4, 4)
    W = StateFunction(m.space, lambda x: x)
    half = Fraction(1, 2)
    chain = Coalgebra(m.functor, m.space, {
        0: Dist({0: 1}),
        1: Dist({0: half, 1: half}),
        2: Dist({1: half, 2: half}),
        3: Dist({2: 1}),
    })
    print("Markov chain drifting down:", certify(chain, 0, m, Certificate(W)).status)


if __name__ == "__main__":
    main()
