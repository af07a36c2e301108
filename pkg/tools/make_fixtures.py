"""Regenerate the bundled problem files in canonical form."""

import json
from pathlib import Path

from lyapcoalg.io import emit, parse_spec

OUT = Path(__file__).resolve().parents[1] / "src" / "lyapcoalg" / "data" / "fixtures"

E8 = list(range(8))
E4 = list(range(4))


def line(space, functor="identity", horizon=8, **extra):
    return {"functor": functor, "space": space, "metric": {"kind": "absolute"},
            "time": {"kind": "naturals", "horizon": horizon}, **extra}


def V(space, f=lambda x: x):
    return {"V": [[x, f(x)] for x in space]}


FIXTURES = {
    "halving": {
        "setting": line(E8),
        "system": {"kind": "coalgebra", "dynamics": [[x, x // 2] for x in E8]},
        "point": 0, "certificate": V(E8),
        "expected": {"validate": 0, "certify": 0, "oracle": 0, "converse": 0, "simulate": 0},
    },
    "halving_search": {
        "setting": line(E8),
        "system": {"kind": "coalgebra", "dynamics": [[x, x // 2] for x in E8]},
        "point": 0,
        "expected": {"certify": 0},
    },
    "halving_bad_certificate": {
        "setting": line(E8),
        "system": {"kind": "coalgebra", "dynamics": [[x, x // 2] for x in E8]},
        "point": 0, "certificate": V(E8, lambda x: 0 if x == 3 else x),
        "expected": {"certify": 1},
    },
    "doubling": {
        "setting": line(E8),
        "system": {"kind": "coalgebra", "dynamics": [[x, min(2 * x, 7)] for x in E8]},
        "point": 0, "certificate": V(E8),
        "expected": {"validate": 0, "certify": 1, "oracle": 1, "converse": 1, "simulate": 0},
    },
    "swap": {
        "setting": {"functor": "identity", "space": ["a", "b", "c"],
                    "metric": {"kind": "table", "rows": [[0, 1, 1], [1, 0, 2], [1, 2, 0]]},
                    "time": {"kind": "naturals", "horizon": 4}},
        "system": {"kind": "flow", "generator": [["a", "b"], ["b", "a"], ["c", "c"]]},
        "point": "c",
        "expected": {"validate": 0, "certify": 1, "oracle": 1, "converse": 1},
    },
    "flow_halving": {
        "setting": line(E8),
        "system": {"kind": "flow", "generator": [[x, x // 2] for x in E8]},
        "point": 0,
        "expected": {"certify": 0, "oracle": 0, "converse": 0, "simulate": 0},
    },
    "graph_branching": {
        "setting": line(E4, "powerset", 4, converse=True),
        "system": {"kind": "coalgebra",
                   "dynamics": [[0, [0]], [1, [0, 1]], [2, [1]], [3, []]]},
        "point": 0, "certificate": V(E4),
        "expected": {"validate": 0, "certify": 0, "oracle": 1, "simulate": 1},
    },
    "markov_dirac": {
        "setting": line(E4, "findist", 4, converse=True),
        "system": {"kind": "coalgebra", "dynamics": [[x, [[x // 2, 1]]] for x in E4]},
        "point": 0, "certificate": V(E4),
        "expected": {"validate": 0, "certify": 0, "oracle": 0, "converse": 0},
    },
    "markov_mixing": {
        "setting": line(E4, "findist", 4),
        "system": {"kind": "coalgebra",
                   "dynamics": [[0, [[0, 1]]], [1, [[0, "1/2"], [1, "1/2"]]],
                                [2, [[0, "1/4"], [1, "3/4"]]], [3, [[2, 1]]]]},
        "point": 0, "certificate": V(E4),
        "expected": {"validate": 0, "certify": 0, "oracle": 1},
    },
    "lts_halving": {
        "setting": line(E4, "labeled", 4),
        "system": {"kind": "coalgebra",
                   "dynamics": [[x, [[t, x >> t] for t in range(5)]] for x in E4]},
        "point": 0, "certificate": V(E4),
        "expected": {"validate": 0, "certify": 0, "oracle": 0, "converse": 0},
    },
    "lts_grid": {
        "setting": {**line(E4, "labeled"), "time": {"kind": "grid", "step": "1/2", "horizon": 2}},
        "system": {"kind": "coalgebra",
                   "dynamics": [[x, [[f"{k}/2", x >> k] for k in range(5)]] for x in E4]},
        "point": 0, "certificate": V(E4),
        "expected": {"validate": 0, "certify": 0, "oracle": 0},
    },
    "decay": {
        "setting": {"functor": "identity", "time": {"kind": "naturals", "horizon": 9}},
        "system": {"kind": "vector_field", "components": ["-x1"], "box": [[-1, 1, 9]],
                   "h": "1/10"},
        "point": [0],
        "expected": {"certify": 0, "oracle": 0, "converse": 0, "simulate": 0},
    },
    "growth": {
        "setting": {"functor": "identity", "time": {"kind": "naturals", "horizon": 9}},
        "system": {"kind": "vector_field", "components": ["x1"], "box": [[-1, 1, 9]],
                   "h": "1/2"},
        "point": [0],
        "expected": {"certify": 1, "oracle": 1, "converse": 1},
    },
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in FIXTURES.items():
        spec = parse_spec({"name": name, **doc})
        (OUT / f"{name}.json").write_text(emit(spec))


if __name__ == "__main__":
    main()
