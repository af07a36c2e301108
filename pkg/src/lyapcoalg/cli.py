"""Command-line front end: ``lyapcoalg <command> [spec.json] [options]``.

Exit status: 0 when every check passes, 1 when a check fails (the report
says which), 2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from fractions import Fraction

from .continuous import Discretization, rk4_integrate
from .core import FiniteSpace, InputError, MeasureScale
from .flows import IncompleteSystemError, integral
from .functors import MAX_LAW_SIZE, FinDist, Identity, Labeled, Powerset, check_monoidal_laws
from .io import SpecError, canonical, dumps, fixture_paths, load_spec
from .lyapunov import (
    LawSizes,
    PreconditionError,
    certify,
    converse_construct,
    flow_decrescent_failures,
    positive_definite_check,
    stability_oracle,
    system_decrescent_failures,
    validate_setting,
)
from .systems import is_T_complete

COMMANDS = ("validate", "laws", "certify", "oracle", "converse", "simulate", "selftest")
FUNCTORS = {
    "identity": lambda: Identity(),
    "powerset": lambda: Powerset(),
    "labeled": lambda: Labeled(FiniteSpace(("a", "b"))),
    "findist": lambda: FinDist(),
}
DEFAULT_LAW_SIZE = {"identity": 4, "powerset": 3, "labeled": 3, "findist": 3}


class Result:
    def __init__(self, ok: bool, body: dict, rows: list | None = None):
        self.ok = ok
        self.body = body
        self.rows = rows  # tabular view for --format csv


def _flow_of(spec):
    if spec.flow is not None:
        return spec.flow
    return integral(spec.coalgebra, spec.setting.clock)


def _completeness_body(exc: IncompleteSystemError) -> dict:
    return {"error": "system is not T-complete",
            "completeness": {"complete": False, "failures": exc.report.failures}}


def cmd_validate(spec, args) -> Result:
    sizes = LawSizes(max_size=min(args.max_size or 2, MAX_LAW_SIZE),
                     curves=spec.options.get("curves", 200),
                     seed=args.seed if args.seed is not None else spec.options.get("seed", 0))
    report = validate_setting(spec.setting, sizes)
    body = {"valid": report.ok, "violations": report.violations, "notes": report.notes}
    if spec.coalgebra is not None:
        body["completeness"] = is_T_complete(spec.coalgebra, spec.setting.clock)
    rows = [["violation", v] for v in report.violations] + [["note", n] for n in report.notes]
    return Result(report.ok, body, rows)


def cmd_laws(spec, args) -> Result:
    if args.functor:
        name = args.functor
        F = FUNCTORS[name]()
    elif spec is not None:
        F = spec.setting.functor
        name = type(F).__name__.lower()
        if isinstance(F, Labeled):
            F = Labeled(FiniteSpace(F.labels.labels[:2]))
            name = "labeled"
    else:
        raise InputError("laws needs --functor or a spec file")
    size = args.max_size or DEFAULT_LAW_SIZE[name]
    if size > MAX_LAW_SIZE:
        raise InputError(f"--max-size above {MAX_LAW_SIZE} is not supported")
    report = check_monoidal_laws(F, size, MeasureScale.from_values([0, 1, 2]))
    results = [{"law": r.law, "passed": r.passed, "checked": r.checked, "witness": r.witness}
               for r in report.results.values()]
    rows = [[r.law, r.passed, r.checked, r.witness] for r in report.results.values()]
    return Result(report.passed, {"functor": name, "max_size": size, "laws": results}, rows)


def _certificate_body(rep) -> dict:
    body = {
        "certified": rep.certified,
        "status": rep.status,
        "consistent": rep.consistent,
        "V": rep.V,
        "checks": [{"name": c.name, "passed": c.passed, "clause": c.clause,
                    "detail": c.detail} for c in rep.checks],
    }
    if rep.oracle is not None:
        body["oracle"] = {"status": rep.oracle.status, "witness": rep.oracle.witness,
                          "counterexample": rep.oracle.counterexample,
                          "obstruction": rep.oracle.obstruction}
    if rep.second_pass is not None:
        body["second_pass"] = _certificate_body(rep.second_pass)
    return body


def cmd_certify(spec, args) -> Result:
    system = spec.coalgebra if spec.coalgebra is not None else spec.flow
    try:
        rep = certify(system, spec.point, spec.setting, spec.certificate,
                      crosscheck=args.oracle_crosscheck)
    except IncompleteSystemError as exc:
        return Result(False, _completeness_body(exc))
    body = _certificate_body(rep)
    body["mode"] = "given" if spec.certificate is not None else "bound-search"
    if isinstance(spec.system, Discretization):
        body["clamped_states"] = spec.system.clamped
    rows = [[c.name, c.passed, c.clause, c.detail] for c in rep.checks]
    return Result(rep.certified and rep.consistent, body, rows)


def cmd_oracle(spec, args) -> Result:
    try:
        phi = _flow_of(spec)
        verdict = stability_oracle(phi, spec.point, spec.setting.metric, spec.setting.scale)
    except IncompleteSystemError as exc:
        return Result(False, _completeness_body(exc))
    except PreconditionError as exc:
        return Result(False, {"error": str(exc)})
    body = {"status": verdict.status, "witness": verdict.witness,
            "counterexample": verdict.counterexample, "obstruction": verdict.obstruction}
    if isinstance(spec.system, Discretization):
        body["clamped_states"] = spec.system.clamped
    return Result(verdict.stable, body, [[verdict.status, verdict.counterexample,
                                          verdict.obstruction]])


def cmd_converse(spec, args) -> Result:
    try:
        phi = _flow_of(spec)
    except IncompleteSystemError as exc:
        return Result(False, _completeness_body(exc))
    s = spec.setting
    V = converse_construct(phi, spec.point, s.metric)
    pd = positive_definite_check(V, spec.point, s.metric, s.scale)
    flow_bad = flow_decrescent_failures(V, phi)
    body = {"V": V, "positive_definite": {"ok": pd.ok, "lower": pd.lower, "upper": pd.upper,
                                          "obstruction": pd.obstruction},
            "flow_decrescent": not flow_bad}
    ok = pd.ok and not flow_bad
    if spec.coalgebra is not None:
        sys_bad = system_decrescent_failures(V, spec.coalgebra, s)
        body["system_decrescent"] = not sys_bad
        ok = ok and not sys_bad
    rows = [[x, v] for x, v in V.items()]
    return Result(ok, body, rows)


def cmd_simulate(spec, args) -> Result:
    steps = spec.options.get("steps")
    if isinstance(spec.system, Discretization):
        sysdoc = spec.source["system"]
        h = Fraction(sysdoc["h"])
        n = steps if steps is not None else spec.setting.time.nticks
        x0 = [Fraction(c) for c in spec.source["point"]]
        tr = rk4_integrate(spec.field_, x0, float(h), n)
        rows = [[k, k * h, *[repr(c) for c in p]] for k, p in enumerate(tr.points)]
        body = {"h": h, "points": [[repr(c) for c in p] for p in tr.points],
                "clamped_states": spec.system.clamped}
        return Result(True, body, rows)
    try:
        phi = _flow_of(spec)
    except IncompleteSystemError as exc:
        return Result(False, _completeness_body(exc))
    n = steps if steps is not None else spec.setting.time.nticks
    orbits = {}
    rows = []
    for x in phi.space:
        orb = phi.orbit(x)
        orbits[repr(x)] = {"prefix": list(orb.prefix), "cycle": list(orb.cycle)}
        rows.extend([x, phi.time.at(k), orb.at(k)] for k in range(n + 1))
    return Result(True, {"orbits": orbits}, rows)


def cmd_selftest(spec, args) -> Result:
    outcomes = []
    for path in fixture_paths():
        try:
            fixture = load_spec(path)
        except SpecError as exc:
            outcomes.append({"fixture": path.name, "command": "load", "expected": 0,
                             "got": 2, "error": str(exc)})
            continue
        for command, expected in sorted(fixture.expected.items()):
            sub = argparse.Namespace(**{**vars(args), "command": command, "functor": None})
            got = _exit(HANDLERS[command](fixture, sub).ok)
            outcomes.append({"fixture": path.name, "command": command,
                             "expected": expected, "got": got})
    ok = all(o["expected"] == o["got"] for o in outcomes)
    rows = [[o["fixture"], o["command"], o["expected"], o["got"]] for o in outcomes]
    return Result(ok, {"fixtures": outcomes}, rows)


HANDLERS = {
    "validate": cmd_validate,
    "laws": cmd_laws,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
    "converse": cmd_converse,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def _exit(ok: bool) -> int:
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lyapcoalg",
                                description="Exact Lyapunov stability checks on finite systems.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", nargs="?", help="problem file (JSON)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--oracle-crosscheck", action="store_true")
    p.add_argument("--functor", choices=sorted(FUNCTORS))
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    return p


def render(result: Result, fmt: str, header: dict) -> str:
    doc = {**header, "ok": result.ok, "exit": _exit(result.ok), "report": result.body}
    if fmt == "json":
        return dumps(doc)
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        for row in result.rows if result.rows is not None else [[k, v] for k, v in
                                                               canonical(result.body).items()]:
            writer.writerow([c if isinstance(c, str) else _cell(c) for c in row])
        return out.getvalue()
    lines = [f"{header['command']}: {'PASS' if result.ok else 'FAIL'}"]
    for key, value in sorted(canonical(result.body).items()):
        lines.append(f"  {key}: {value}")
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    c = canonical(v)
    return c if isinstance(c, str) else str(c).replace("'", '"')


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    header = {"command": args.command}
    try:
        spec = None
        if args.spec is not None:
            spec = load_spec(args.spec, args.horizon)
            header["spec"] = spec.name or args.spec
        elif args.command not in ("laws", "selftest"):
            raise InputError(f"{args.command} needs a spec file")
        result = HANDLERS[args.command](spec, args)
    except SpecError as exc:
        sys.stdout.write(dumps({**header, "ok": False, "exit": 2,
                                "errors": [{"pointer": p, "message": m} for p, m in exc.errors]}))
        return 2
    except InputError as exc:
        sys.stdout.write(dumps({**header, "ok": False, "exit": 2, "errors": [{"message": str(exc)}]}))
        return 2
    if args.timing:
        header["timing_s"] = f"{time.perf_counter() - start:.3f}"
    sys.stdout.write(render(result, args.format, header))
    return _exit(result.ok)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
