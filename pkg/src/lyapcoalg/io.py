"""Problem files: schema validation, resolution and canonical JSON.

Every rational is written as an integer-free string (``"3"``, ``"1/2"``)
and every document is emitted with sorted keys, so equal objects always
serialize to identical bytes.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .continuous import Discretization, VectorField, discretize
from .core import ClassK, FiniteSpace, InputError, MeasureScale, Metric, StateFunction, TimeMonoid
from .flows import Flow
from .functors import Dist, FinDist, Identity, Labeled, Powerset
from .lyapunov import Certificate, DynamicSetting
from .settings import default_scale, make_setting
from .systems import Coalgebra

__all__ = [
    "SCHEMA_ID",
    "SpecError",
    "ProblemSpec",
    "schema",
    "load_spec",
    "parse_spec",
    "spec_document",
    "emit",
    "canonical",
    "dumps",
    "fixture_paths",
]

SCHEMA_ID = "urn:lyapcoalg:problem:1.0"


class SpecError(InputError):
    """Schema or resolution failures, each with a JSON pointer."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{p or '/'}: {m}" for p, m in errors))


def schema() -> dict:
    text = resources.files("lyapcoalg").joinpath("data/problem.schema.json").read_text()
    return json.loads(text)


def fixture_paths() -> list[Path]:
    root = resources.files("lyapcoalg").joinpath("data/fixtures")
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


# -- canonical serialization -------------------------------------------------


def _sort_key(v) -> str:
    return json.dumps(v, sort_keys=True)


def canonical(obj):
    """Plain JSON data for ``obj`` with rationals as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, Dist):
        return sorted(([canonical(x), canonical(w)] for x, w in obj.items()), key=_sort_key)
    if isinstance(obj, (frozenset, set)):
        return sorted((canonical(x) for x in obj), key=_sort_key)
    if isinstance(obj, (list, tuple)):
        return [canonical(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, StateFunction):
        return [[canonical(x), canonical(v)] for x, v in obj.items()]
    if isinstance(obj, ClassK):
        return [[canonical(r), canonical(v)] for r, v in sorted(obj.table.items())]
    if dataclasses.is_dataclass(obj):
        return {f.name: canonical(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    return str(obj)


def dumps(data) -> str:
    return json.dumps(canonical(data), sort_keys=True, indent=2) + "\n"


# -- parsing ------------------------------------------------------------------


def _rat(v) -> Fraction:
    return Fraction(v) if isinstance(v, int) else Fraction(v)


def _schema_errors(doc) -> list[tuple[str, str]]:
    validator = jsonschema.Draft202012Validator(schema())
    out = []
    for err in validator.iter_errors(doc):
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        out.extend(_describe(err, pointer))
    return sorted(set(out))


def _describe(err, pointer: str) -> list[tuple[str, str]]:
    path = list(err.absolute_path)
    if err.validator == "enum" and path and path[-1] in ("functor", "kind"):
        return [(pointer, f"unsupported kind {err.instance!r}")]
    if err.validator in ("oneOf", "pattern", "type") and (
            isinstance(err.instance, float)
            or (isinstance(err.instance, str) and err.validator != "type")):
        if isinstance(err.instance, (float, str)):
            return [(pointer, f"non-rational numeral {err.instance!r}")]
    if err.context:
        # report the most specific sub-failure of a combinator
        best = min(err.context, key=lambda e: -len(e.absolute_path))
        return _describe(best, "/" + "/".join(str(p) for p in best.absolute_path))
    return [(pointer, err.message)]


@dataclass
class ProblemSpec:
    name: str
    setting: DynamicSetting
    system: object  # Coalgebra | Flow | Discretization
    point: object
    certificate: Certificate | None = None
    options: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, repr=False)
    field_: VectorField | None = None

    @property
    def coalgebra(self) -> Coalgebra | None:
        if isinstance(self.system, Discretization):
            return self.system.system
        return self.system if isinstance(self.system, Coalgebra) else None

    @property
    def flow(self) -> Flow | None:
        return self.system if isinstance(self.system, Flow) else None

    def __eq__(self, other) -> bool:
        return isinstance(other, ProblemSpec) and spec_document(self) == spec_document(other)


class _Resolver:
    def __init__(self):
        self.errors: list[tuple[str, str]] = []

    def fail(self, pointer: str, message: str):
        self.errors.append((pointer, message))

    def state(self, space: FiniteSpace, v, pointer: str):
        if v not in space or isinstance(v, bool):
            self.fail(pointer, f"dangling label {v!r}")
            return None
        return space.labels[space.index(v)]


def _time(doc: dict | None, n: int, horizon_override) -> TimeMonoid:
    if doc is None:
        doc = {"kind": "naturals", "horizon": max(n, 2)}
    horizon = horizon_override if horizon_override is not None else doc["horizon"]
    if doc["kind"] == "naturals":
        return TimeMonoid.naturals(_rat(horizon))
    return TimeMonoid.grid(_rat(doc.get("step", 1)), _rat(horizon))


def _metric(doc: dict | None, E: FiniteSpace, res: _Resolver) -> Metric | None:
    doc = doc or {"kind": "discrete"}
    kind = doc["kind"]
    if kind == "discrete":
        return Metric.discrete(E)
    if kind == "absolute":
        if not all(isinstance(x, int) for x in E):
            res.fail("/setting/metric/kind", "absolute metric needs integer states")
            return None
        return Metric.absolute(E)
    rows = doc.get("rows")
    if rows is None or len(rows) != len(E) or any(len(r) != len(E) for r in rows):
        res.fail("/setting/metric/rows", f"metric table must be {len(E)} x {len(E)}")
        return None
    return Metric(E, {(a, b): _rat(rows[i][j]) for i, a in enumerate(E) for j, b in enumerate(E)})


def _value(F, raw, E: FiniteSpace, time: TimeMonoid, res: _Resolver, pointer: str):
    if isinstance(F, Identity):
        return res.state(E, raw, pointer)
    if not isinstance(raw, list):
        res.fail(pointer, "expected a list")
        return None
    if isinstance(F, Powerset):
        return frozenset(res.state(E, x, f"{pointer}/{i}") for i, x in enumerate(raw))
    if isinstance(F, Labeled):
        edges = []
        for i, edge in enumerate(raw):
            if not (isinstance(edge, list) and len(edge) == 2):
                res.fail(f"{pointer}/{i}", "expected [label, state]")
                continue
            label = res.state(F.labels, _as_label(edge[0], res, f"{pointer}/{i}/0"),
                              f"{pointer}/{i}/0")
            edges.append((label, res.state(E, edge[1], f"{pointer}/{i}/1")))
        return frozenset(edges)
    weights = {}
    for i, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 2):
            res.fail(f"{pointer}/{i}", "expected [state, weight]")
            continue
        x = res.state(E, item[0], f"{pointer}/{i}/0")
        w = _as_rational(item[1], res, f"{pointer}/{i}/1")
        if x is not None and w is not None:
            weights[x] = weights.get(x, 0) + w
    try:
        return Dist(weights)
    except InputError as exc:
        res.fail(pointer, str(exc))
        return None


def _as_rational(v, res: _Resolver, pointer: str):
    try:
        if isinstance(v, bool) or isinstance(v, float):
            raise ValueError
        return _rat(v)
    except (ValueError, ZeroDivisionError, TypeError):
        res.fail(pointer, f"non-rational numeral {v!r}")
        return None


def _as_label(v, res: _Resolver, pointer: str):
    """Time labels are rationals; naturals collapse to ints."""
    r = _as_rational(v, res, pointer)
    if r is None:
        return None
    return int(r) if r.denominator == 1 else r


def _classk(pairs, res: _Resolver, pointer: str):
    if pairs is None:
        return None
    table = {}
    for i, (r, v) in enumerate(pairs):
        a = _as_rational(r, res, f"{pointer}/{i}/0")
        b = _as_rational(v, res, f"{pointer}/{i}/1")
        if a is not None and b is not None:
            table[a] = b
    try:
        return ClassK(table)
    except InputError as exc:
        res.fail(pointer, str(exc))
        return None


def parse_spec(doc: dict, horizon: int | None = None) -> ProblemSpec:
    """Resolve an already-decoded document into library objects."""
    errors = _schema_errors(doc)
    if errors:
        raise SpecError(errors)
    res = _Resolver()
    sdoc, sysdoc = doc["setting"], doc["system"]
    kind = sdoc["functor"]
    field_ = None
    point = doc["point"]
    if sysdoc["kind"] == "vector_field":
        if kind != "identity":
            res.fail("/setting/functor", "vector fields discretize to the identity kind")
            raise SpecError(res.errors)
        if not isinstance(point, list) or len(point) != len(sysdoc["components"]):
            raise SpecError([("/point", "expected a coordinate list matching the field")])
        try:
            field_ = VectorField(tuple(sysdoc["components"]))
            D = discretize(field_, [(_rat(lo), _rat(hi), c) for lo, hi, c in sysdoc["box"]],
                           _rat(sysdoc["h"]))
        except InputError as exc:
            raise SpecError([("/system", str(exc))]) from None
        E, d = D.system.space, D.metric
        scale = D.scale if "scale" not in sdoc else None
        system = D
        xstar = D.nearest([_rat(c) for c in point])
    else:
        if "space" not in sdoc:
            raise SpecError([("/setting/space", "missing state space")])
        labels = sdoc["space"]
        if len(set(map(repr, labels))) != len(labels):
            raise SpecError([("/setting/space", "duplicate state")])
        E = FiniteSpace(tuple(labels))
        d = _metric(sdoc.get("metric"), E, res)
        scale = None
        system = None
        xstar = res.state(E, point, "/point") if not isinstance(point, list) else None
        if isinstance(point, list):
            res.fail("/point", "coordinate point given for a finite system")
    try:
        time = _time(sdoc.get("time"), len(E), horizon)
    except InputError as exc:
        raise SpecError([("/setting/time", str(exc))]) from None
    if "scale" in sdoc:
        vals = [_as_rational(v, res, f"/setting/scale/{i}") for i, v in enumerate(sdoc["scale"])]
        try:
            scale = MeasureScale(tuple(vals)) if None not in vals else None
        except InputError as exc:
            res.fail("/setting/scale", str(exc))
    elif scale is None and d is not None:
        scale = default_scale(d)
    if res.errors or d is None or scale is None:
        raise SpecError(res.errors or [("/setting", "unresolvable setting")])
    try:
        setting = make_setting(kind, E, d, scale, time, bool(sdoc.get("monoidal")),
                               bool(sdoc.get("converse")), sdoc.get("order", ""),
                               doc.get("name", ""))
    except InputError as exc:
        raise SpecError([("/setting", str(exc))]) from None
    F = setting.functor
    if sysdoc["kind"] == "coalgebra":
        dynamics = {}
        for i, pair in enumerate(sysdoc["dynamics"]):
            x = res.state(E, pair[0], f"/system/dynamics/{i}/0")
            v = _value(F, pair[1], E, time, res, f"/system/dynamics/{i}/1")
            if x is not None and x in dynamics:
                res.fail(f"/system/dynamics/{i}/0", f"duplicate state {x!r}")
            dynamics[x] = v
        if not res.errors:
            try:
                system = Coalgebra(F, E, dynamics)
            except InputError as exc:
                res.fail("/system/dynamics", str(exc))
    elif sysdoc["kind"] == "flow":
        gen = {}
        for i, (x, y) in enumerate(sysdoc["generator"]):
            gen[res.state(E, x, f"/system/generator/{i}/0")] = \
                res.state(E, y, f"/system/generator/{i}/1")
        if not res.errors:
            try:
                system = Flow(time, E, gen)
            except InputError as exc:
                res.fail("/system/generator", str(exc))
    certificate = None
    if "certificate" in doc:
        cdoc = doc["certificate"]
        table = {}
        for i, (x, v) in enumerate(cdoc["V"]):
            s = res.state(E, x, f"/certificate/V/{i}/0")
            table[s] = _as_rational(v, res, f"/certificate/V/{i}/1")
        missing = [x for x in E if x not in table]
        if missing:
            res.fail("/certificate/V", f"V undefined at {missing[0]!r}")
        lower = _classk(cdoc.get("lower"), res, "/certificate/lower")
        upper = _classk(cdoc.get("upper"), res, "/certificate/upper")
        if not res.errors:
            certificate = Certificate(StateFunction(E, table), lower, upper)
    options = dict(doc.get("options", {}))
    for key in ("eps", "tol"):
        if key in options:
            options[key] = _as_rational(options[key], res, f"/options/{key}")
    if res.errors:
        raise SpecError(res.errors)
    spec = ProblemSpec(doc.get("name", ""), setting, system, xstar, certificate, options,
                       dict(doc.get("expected", {})), sysdoc, field_)
    spec.point = xstar
    spec.source = {"system": sysdoc, "point": point}
    return spec


def load_spec(path, horizon: int | None = None) -> ProblemSpec:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise SpecError([("", f"no such file {str(path)!r}")]) from None
    except json.JSONDecodeError as exc:
        raise SpecError([("", f"invalid JSON: {exc.msg} at line {exc.lineno}")]) from None
    return parse_spec(doc, horizon)


# -- emission -----------------------------------------------------------------


def _value_doc(F, v):
    if isinstance(F, Identity):
        return canonical(v)
    if isinstance(F, Powerset):
        return canonical(v)
    if isinstance(F, Labeled):
        return sorted(([canonical(a), canonical(x)] for a, x in v), key=_sort_key)
    return canonical(v)


def _time_doc(t: TimeMonoid) -> dict:
    doc = {"kind": t.kind, "horizon": canonical(t.horizon)}
    if t.kind == "grid":
        doc["step"] = canonical(t.step)
    return doc


def spec_document(spec: ProblemSpec) -> dict:
    """The canonical document describing ``spec``."""
    s = spec.setting
    setting = {
        "functor": {Identity: "identity", Powerset: "powerset", Labeled: "labeled",
                    FinDist: "findist"}[type(s.functor)],
        "time": _time_doc(s.time),
        "scale": canonical(s.scale.values),
        "order": s.forder.rule,
        "monoidal": s.monoidal,
        "converse": s.converse,
    }
    if isinstance(spec.system, Discretization):
        sysdoc = {
            "kind": "vector_field",
            "components": list(spec.field_.components),
            "box": canonical([[_rat(lo), _rat(hi), c] for lo, hi, c in spec.source["system"]["box"]]),
            "h": canonical(_rat(spec.source["system"]["h"])),
        }
        point = canonical([_rat(c) for c in spec.source["point"]])
    else:
        E = s.space
        setting["space"] = canonical(list(E.labels))
        setting["metric"] = {"kind": "table",
                             "rows": [[canonical(s.metric(a, b)) for b in E] for a in E]}
        if isinstance(spec.system, Flow):
            sysdoc = {"kind": "flow",
                      "generator": [[canonical(x), canonical(spec.system.generator[x])] for x in E]}
        else:
            F = spec.system.functor
            sysdoc = {"kind": "coalgebra",
                      "dynamics": [[canonical(x), _value_doc(F, spec.system.dynamics[x])]
                                   for x in E if x in spec.system.dynamics]}
        point = canonical(spec.point)
    doc = {"$schema": SCHEMA_ID, "version": "1.0", "setting": setting, "system": sysdoc,
           "point": point}
    if spec.name:
        doc["name"] = spec.name
    if spec.expected:
        doc["expected"] = dict(spec.expected)
    if spec.certificate is not None:
        c = spec.certificate
        doc["certificate"] = {"V": canonical(c.V)}
        if c.lower is not None:
            doc["certificate"]["lower"] = canonical(c.lower)
        if c.upper is not None:
            doc["certificate"]["upper"] = canonical(c.upper)
    if spec.options:
        doc["options"] = canonical(spec.options)
    return doc


def emit(spec: ProblemSpec) -> str:
    return dumps(spec_document(spec))
