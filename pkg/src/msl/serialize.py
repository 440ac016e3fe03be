"""JSON reading and writing.

Every number is written as an integer or as a "p/q" string, never as a
float.  Documents produced here carry ``"schema": "msl-fan/1"`` and a
``"kind"``; hand-written inputs (targets, configs, stars) may omit the
schema field, but if present it must match.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .complex import BalanceEntry, Facet, ModuliComplex, WeightCheck
from .errors import InputError
from .localfan import LocalFan, Resolution, StarEnd, VertexStar, WeightedRay
from .maptypes import DegreeSpec, StableMapType
from .target import Cell, Edge, Ray, TargetCurve, standard_line

SCHEMA = "msl-fan/1"

Json = Any


# ---------------------------------------------------------------- numbers


def rational_to_json(x: Union[int, Fraction]) -> Union[int, str]:
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return "%d/%d" % (x.numerator, x.denominator)


def rational_from_json(v: Json) -> Fraction:
    if isinstance(v, bool):
        raise InputError("expected a rational, got %r" % (v,))
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError("bad rational %r" % v) from exc
    raise InputError("expected an integer or a \"p/q\" string, got %r" % (v,))


def int_from_json(v: Json, what: str = "integer") -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError("expected %s, got %r" % (what, v))
    return v


def int_vector(v: Json, what: str = "direction") -> tuple[int, ...]:
    if not isinstance(v, list) or not v:
        raise InputError("expected a non-empty integer list for %s, got %r" % (what, v))
    return tuple(int_from_json(x, what) for x in v)


def _require(obj: Json, key: str, where: str) -> Json:
    if not isinstance(obj, dict):
        raise InputError("%s must be a JSON object" % where)
    if key not in obj:
        raise InputError("%s: missing field %r" % (where, key))
    return obj[key]


def check_schema(doc: Json, kind: Optional[str] = None, required: bool = False) -> None:
    if not isinstance(doc, dict):
        raise InputError("top level must be a JSON object")
    if "schema" in doc or required:
        if doc.get("schema") != SCHEMA:
            raise InputError("unsupported schema %r (expected %r)" % (doc.get("schema"), SCHEMA))
    if kind is not None and "kind" in doc and doc["kind"] != kind:
        raise InputError("expected a %r document, got %r" % (kind, doc["kind"]))


def dumps(doc: Json) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def load_json(source: str) -> Json:
    """Parse inline JSON, or read it from a file path."""
    text = source
    if not source.lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InputError("cannot read %s: %s" % (source, exc.strerror)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("malformed JSON at line %d column %d: %s" % (exc.lineno, exc.colno, exc.msg)) from exc


# ----------------------------------------------------------------- target


def target_to_json(target: TargetCurve) -> Json:
    return {
        "vertices": [[rational_to_json(x) for x in p] for p in target.vertices],
        "edges": [
            {"tail": e.tail, "head": e.head, "direction": list(e.direction), "length": rational_to_json(e.length)}
            for e in target.edges
        ],
        "rays": [{"vertex": r.vertex, "direction": list(r.direction)} for r in target.rays],
    }


def target_from_json(doc: Json) -> TargetCurve:
    if isinstance(doc, dict) and "standard_line" in doc:
        q = int_from_json(doc["standard_line"], "standard_line q")
        if q < 1:
            raise InputError("standard_line needs q >= 1")
        return standard_line(q)
    check_schema(doc)
    verts = _require(doc, "vertices", "target")
    if not isinstance(verts, list) or not verts:
        raise InputError("target: vertices must be a non-empty list")
    vertices = []
    for p in verts:
        if not isinstance(p, list) or not p:
            raise InputError("target: vertex %r is not a coordinate list" % (p,))
        vertices.append(tuple(rational_from_json(x) for x in p))
    edges = []
    for e in doc.get("edges", []):
        edges.append(
            Edge(
                int_from_json(_require(e, "tail", "edge"), "edge tail"),
                int_from_json(_require(e, "head", "edge"), "edge head"),
                int_vector(_require(e, "direction", "edge")),
                rational_from_json(_require(e, "length", "edge")),
            )
        )
    rays = [
        Ray(int_from_json(_require(r, "vertex", "ray"), "ray vertex"), int_vector(_require(r, "direction", "ray")))
        for r in doc.get("rays", [])
    ]
    r = len(vertices[0])
    if any(len(p) != r for p in vertices) or any(len(x.direction) != r for x in list(edges) + list(rays)):
        raise InputError("target: coordinates of inconsistent dimension")
    nv = len(vertices)
    for e in edges:
        if not (0 <= e.tail < nv and 0 <= e.head < nv):
            raise InputError("target: edge endpoint out of range")
    for x in rays:
        if not 0 <= x.vertex < nv:
            raise InputError("target: ray vertex out of range")
    return TargetCurve(tuple(vertices), tuple(edges), tuple(rays))


# ----------------------------------------------------------------- degree


def degree_to_json(degree: DegreeSpec) -> Json:
    return {"directions": [list(v) for v in degree.directions], "n": degree.n}


def degree_from_json(doc: Json, n: Optional[int] = None) -> DegreeSpec:
    if isinstance(doc, dict):
        dirs = _require(doc, "directions", "degree")
        n = doc.get("n", n)
    else:
        dirs = doc
    if not isinstance(dirs, list) or not dirs:
        raise InputError("degree must be a non-empty list of directions")
    try:
        return DegreeSpec.of([int_vector(v, "end direction") for v in dirs], None if n is None else int_from_json(n, "n"))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError("degree: %s" % exc) from exc


# ------------------------------------------------------------------ types


def cell_from_str(s: str) -> Cell:
    kinds = {"V": "vertex", "E": "edge", "R": "ray"}
    if not isinstance(s, str) or len(s) < 2 or s[0] not in kinds or not s[1:].isdigit():
        raise InputError("bad cell name %r" % (s,))
    return Cell(kinds[s[0]], int(s[1:]))


def type_to_json(map_type: StableMapType) -> Json:
    return {"splits": [list(s) for s in map_type.splits], "cells": [str(c) for c in map_type.cells]}


def type_from_json(doc: Json, degree: DegreeSpec, target: TargetCurve) -> StableMapType:
    splits = tuple(tuple(int_from_json(x, "label") for x in s) for s in _require(doc, "splits", "cell"))
    cells = tuple(cell_from_str(c) for c in _require(doc, "cells", "cell"))
    try:
        return StableMapType(degree, splits, cells, target)
    except ValueError as exc:
        raise InputError("cell: %s" % exc) from exc


# ---------------------------------------------------------------- complex


def _balance_to_json(entries: Sequence[BalanceEntry]) -> Json:
    return [
        {
            "face": e.face,
            "passed": e.passed,
            "residual": [rational_to_json(x) for x in e.residual],
            "contributions": [
                {"cell": i, "weight": rational_to_json(w), "normal": [rational_to_json(x) for x in u]}
                for i, w, u in e.contributions
            ],
        }
        for e in entries
    ]


def summary_line(moduli: ModuliComplex) -> str:
    maximal = moduli.maximal_indices()
    weights = ",".join(str(rational_to_json(moduli.weights[i])) for i in maximal)
    return "dim %d, %d maximal cell%s, weights %s" % (
        moduli.dimension,
        len(maximal),
        "" if len(maximal) == 1 else "s",
        weights or "-",
    )


def complex_to_json(
    moduli: ModuliComplex,
    balance: Optional[Sequence[BalanceEntry]] = None,
    weight_checks: Optional[Sequence[WeightCheck]] = None,
) -> Json:
    counts: dict[int, int] = {}
    for d in moduli.dimensions:
        counts[d] = counts.get(d, 0) + 1
    doc: Json = {
        "schema": SCHEMA,
        "kind": "complex",
        "target": target_to_json(moduli.target),
        "degree": degree_to_json(moduli.degree),
        "covering_degree": moduli.covering_degree,
        "expected_dimension": moduli.expected_dimension,
        "dimension": moduli.dimension,
        "pure": moduli.is_pure(),
        "cells_per_dimension": {str(d): counts[d] for d in sorted(counts)},
        "summary": summary_line(moduli),
        "cells": [],
    }
    for i, map_type in enumerate(moduli.cells):
        entry = type_to_json(map_type)
        entry["index"] = i
        entry["dimension"] = moduli.dimensions[i]
        entry["description"] = map_type.describe()
        if i in moduli.weights:
            entry["weight"] = rational_to_json(moduli.weights[i])
        entry["facets"] = [
            {"face": j, "tight": list(f.tight), "normal": list(f.normal_local)} for j, f in moduli.facets.get(i, [])
        ]
        doc["cells"].append(entry)
    if balance is not None:
        doc["balancing"] = {"balanced": all(e.passed for e in balance), "faces": _balance_to_json(balance)}
    if weight_checks is not None:
        doc["weight_consistency"] = [
            {
                "face": w.face,
                "vertex": w.vertex,
                "passed": w.passed,
                "local": [rational_to_json(x) for x in w.local],
                "adjacent": [rational_to_json(x) for x in w.adjacent],
            }
            for w in weight_checks
        ]
    return doc


def complex_from_json(doc: Json) -> ModuliComplex:
    check_schema(doc, "complex", required=True)
    target = target_from_json(_require(doc, "target", "complex"))
    degree = degree_from_json(_require(doc, "degree", "complex"))
    raw_cells = _require(doc, "cells", "complex")
    if not isinstance(raw_cells, list):
        raise InputError("complex: cells must be a list")
    cells = [type_from_json(c, degree, target) for c in raw_cells]
    dims = [int_from_json(_require(c, "dimension", "cell"), "dimension") for c in raw_cells]
    weights = {i: rational_from_json(c["weight"]) for i, c in enumerate(raw_cells) if "weight" in c}
    facet_map = {}
    for i, c in enumerate(raw_cells):
        fs = []
        for f in c.get("facets", []):
            j = _require(f, "face", "facet")
            if j is None or not 0 <= int_from_json(j, "face index") < len(cells):
                raise InputError("facet of cell %d refers to an unknown face" % i)
            fs.append((j, Facet(cells[j], tuple(f.get("tight", [])), int_vector(_require(f, "normal", "facet"), "normal"))))
        facet_map[i] = fs
    return ModuliComplex(
        target,
        degree,
        int_from_json(_require(doc, "covering_degree", "complex"), "covering_degree"),
        int_from_json(_require(doc, "expected_dimension", "complex"), "expected_dimension"),
        cells,
        dims,
        weights,
        facet_map,
    )


# -------------------------------------------------------------- local fan


def star_to_json(s: VertexStar) -> Json:
    return {
        "q": s.q,
        "n": s.n,
        "ends": [{"label": e.label, "ray": e.ray, "weight": e.weight} for e in s.ends],
    }


def star_from_json(doc: Json) -> VertexStar:
    check_schema(doc, "star")
    q = int_from_json(_require(doc, "q", "star"), "q")
    ends = []
    for k, e in enumerate(_require(doc, "ends", "star")):
        if isinstance(e, list):
            if len(e) not in (2, 3):
                raise InputError("star end must be [ray, weight] or [ray, weight, label]")
            ray, weight = e[0], e[1]
            label = e[2] if len(e) == 3 else k + 1
        else:
            ray, weight = _require(e, "ray", "end"), _require(e, "weight", "end")
            label = e.get("label", k + 1)
        ends.append(
            StarEnd(
                int_from_json(label, "label"),
                None if ray is None else int_from_json(ray, "ray index"),
                int_from_json(weight, "weight"),
            )
        )
    try:
        s = VertexStar(q, tuple(sorted(ends, key=lambda e: e.label)))
    except ValueError as exc:
        raise InputError("star: %s" % exc) from exc
    if "n" in doc and int_from_json(doc["n"], "n") != s.n:
        raise InputError("star: n=%s but %d contracted ends given" % (doc["n"], s.n))
    return s


def resolution_to_json(r: Resolution) -> Json:
    doc: Json = {"kind": r.kind}
    if r.kind == "I":
        doc.update(ends=[r.end, r.other], weight_sum=r.d1)
    elif r.kind == "II":
        doc.update(end=r.end, d1=r.d1, d2=r.d2, side1=list(r.side1), side2=list(r.side2))
    else:
        doc.update(partner=r.end, contracted=r.other)
    return doc


def resolution_from_json(doc: Json) -> Resolution:
    kind = _require(doc, "kind", "resolution")
    if kind == "I":
        a, b = doc["ends"]
        return Resolution("I", a, b, doc["weight_sum"])
    if kind == "II":
        return Resolution("II", doc["end"], 0, doc["d1"], doc["d2"], tuple(doc["side1"]), tuple(doc["side2"]))
    if kind == "contracted":
        return Resolution("contracted", doc["partner"], doc["contracted"])
    raise InputError("unknown resolution kind %r" % (kind,))


def local_fan_to_json(fan: LocalFan, balanced: bool, residual: Sequence[Fraction]) -> Json:
    return {
        "schema": SCHEMA,
        "kind": "local-fan",
        "star": star_to_json(fan.star),
        "rays": [
            {
                "resolution": resolution_to_json(r.resolution),
                "primitive": list(r.primitive),
                "weight": rational_to_json(r.weight),
            }
            for r in fan.rays
        ],
        "zero_weight": [resolution_to_json(r) for r in fan.zero_weight],
        "balanced": balanced,
        "residual": [rational_to_json(x) for x in residual],
    }


def local_fan_from_json(doc: Json) -> LocalFan:
    check_schema(doc, "local-fan", required=True)
    star = star_from_json(doc["star"])
    rays = [
        WeightedRay(int_vector(r["primitive"], "primitive"), rational_from_json(r["weight"]), resolution_from_json(r["resolution"]))
        for r in doc["rays"]
    ]
    zeros = [resolution_from_json(r) for r in doc.get("zero_weight", [])]
    return LocalFan(star, rays, zeros)


def error_json(message: str, code: int) -> Json:
    return {"schema": SCHEMA, "kind": "error", "exit_code": code, "message": message}
