"""A flow seen as a labelled transition system with time stamps as labels.

Run with ``python3 demos/behavioral_lts.py``.
"""

from lyapcoalg import DynamicSetting, FiniteSpace, Flow, StateFunction, behavioral_lts
from lyapcoalg import flow_decrescent_check, system_decrescent_check
from lyapcoalg.settings import behavioral_lts_setting


def main():
    base = behavioral_lts_setting(5)
    E = FiniteSpace.range(5)
    s = DynamicSetting(**{**base.__dict__, "space": E})
    rotate = Flow.from_step(s.time, E, lambda x: (x + 1) % 5)
    settle = Flow.from_step(s.time, E, lambda x: max(x - 1, 0))
    V = StateFunction(E, lambda x: x)
    for name, phi in (("rotation", rotate), ("settling", settle)):
        lts = behavioral_lts(phi)
        edges = sorted(lts.dynamics[3])
        print(f"{name}: edges out of 3 = {edges}")
        print(f"    along the flow: {flow_decrescent_check(V, phi)}, "
              f"as a system: {system_decrescent_check(V, lts, s)}")


if __name__ == "__main__":
    main()
