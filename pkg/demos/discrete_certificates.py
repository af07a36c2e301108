"""Certify, reject and reconstruct Lyapunov functions for maps on {0..7}.

Run with ``python3 demos/discrete_certificates.py``.
"""

from lyapcoalg import Certificate, certify, converse_construct, integral, norm_to_point
from lyapcoalg import stability_oracle
from lyapcoalg.settings import discrete_setting, doubling_system, halving_system


def show(title, report):
    print(f"{title}: {report.status}")
    for check in report.checks:
        mark = "ok " if check.passed else "BAD"
        print(f"    [{mark}] {check.name}" + (f": {check.detail}" if check.detail else ""))


def main():
    s = discrete_setting(8)
    norm = norm_to_point(s.metric, 0)

    # Halving drives every state to 0, and the distance to 0 never grows.
    halving = halving_system(8)
    show("halving with V = |x|", certify(halving, 0, s, Certificate(norm), crosscheck=True))

    # Without a candidate, the orbit-maximum construction supplies one.
    phi = integral(halving, s.clock)
    V = converse_construct(phi, 0, s.metric)
    print("constructed V:", {x: str(v) for x, v in V.items()})

    # Doubling (saturating at 7) pushes states away from 0.
    doubling = doubling_system(8)
    show("doubling with V = |x|", certify(doubling, 0, s, Certificate(norm)))
    verdict = stability_oracle(integral(doubling, s.clock), 0, s.metric, s.scale)
    print(f"oracle: {verdict.status}; {verdict.obstruction}")


if __name__ == "__main__":
    main()
