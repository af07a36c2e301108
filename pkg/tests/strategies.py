"""Hypothesis strategies and small independent oracles shared by the tests."""

from fractions import Fraction
import itertools
import random

from hypothesis import strategies as st

from lyapcoalg import FiniteSpace, Metric, TimeMonoid


def endomaps(max_n=8, min_n=1):
    """``(n, table)`` with ``table[x]`` the image of ``x`` in ``range(n)``."""
    return st.integers(min_n, max_n).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))


def scales(max_len=5):
    return st.lists(st.fractions(min_value=Fraction(1, 8), max_value=8), min_size=0,
                    max_size=max_len - 1, unique=True).map(lambda v: [Fraction(0)] + sorted(v))


def random_metric(rng: random.Random, space: FiniteSpace, top: int = 4) -> Metric:
    """A symmetric metric with positive integer off-diagonal entries."""
    table = {}
    for i, a in enumerate(space):
        table[(a, a)] = 0
        for b in space.labels[i + 1:]:
            table[(a, b)] = table[(b, a)] = rng.randint(1, top)
    return Metric(space, table)


def naive_iterates(step, x, k):
    """``x, step(x), ..., step^k(x)`` by plain repetition."""
    out = [x]
    for _ in range(k):
        x = step(x)
        out.append(x)
    return out


def naive_stable(step, xstar, norm, n):
    """Stability on a finite chain: no orbit ever exceeds its starting norm.

    On a finite chain the identity is the only order automorphism, so the
    class-K bound collapses to ``|phi_t x| <= |x|``; ``n`` iterates reach
    every state an orbit can visit.
    """
    return all(max(norm[y] for y in naive_iterates(step, x, n)) <= norm[x] for x in norm)


def all_endomaps(n):
    return list(itertools.product(range(n), repeat=n))


def naturals(h):
    return TimeMonoid.naturals(h)
