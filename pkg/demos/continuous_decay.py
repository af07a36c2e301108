"""From a vector field to a finite system and back to a stability verdict.

Run with ``python3 demos/continuous_decay.py``.
"""

import math
from fractions import Fraction

import numpy as np

from lyapcoalg import integral, stability_oracle
from lyapcoalg.continuous import ScalarField, VectorField, discretize
from lyapcoalg.continuous import lie_derivative_check, rk4_integrate
from lyapcoalg.settings import make_setting


def main():
    decay = VectorField(("-x",))
    lie = lie_derivative_check(ScalarField("x**2"), decay, np.linspace(-2, 2, 1000))
    print(f"V = x^2 along x' = -x: largest rate {lie.worst_value:.2e} (ok: {lie.ok})")

    end = rk4_integrate(decay, (1,), 0.01, 100).endpoint[0]
    print(f"RK4 at t = 1: {end:.12f}, exact {math.exp(-1):.12f}")

    for field, h in (("-x1", Fraction(1, 10)), ("x1", Fraction(1, 2))):
        for cells in (5, 9, 17):
            D = discretize(VectorField((field,)), [(-1, 1, cells)], h)
            s = make_setting("identity", D.system.space, D.metric, D.scale)
            verdict = stability_oracle(integral(D.system, s.clock), D.nearest((0,)),
                                       D.metric, D.scale)
            print(f"x' = {field:>3}, h = {h}, {cells:2d} cells: {verdict.status}"
                  f" (clamped states: {len(D.clamped)})")


if __name__ == "__main__":
    main()
