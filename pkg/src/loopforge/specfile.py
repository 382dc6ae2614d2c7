"""JSON spec files: the single on-disk format for constructions.

Two top-level shapes are accepted:

    {"field": {...}, "n": 2, "A": [[..]], "B": [[..]],
     "group": {"generators": [...], "cap": 100000},
     "delta": {"kind": "identity" | "zero" | "inner" | "gen_images", ...}}

    {"family": "3.9a", "params": {...}}

Field element encodings: prime -> int, quadratic -> [a0, a1] (or int),
rational -> "p/q" string (or int), real -> number, complex -> [re, im]
(or number).
"""

from __future__ import annotations

import json
from typing import List, Tuple

from .errors import SpecFileError
from .fields import (
    ComplexField,
    Field,
    PrimeField,
    QuadraticField,
    RationalField,
    RealField,
)
from .linalg import SquareMatrix
from .loops import LoopSpec
from .matgroup import DEFAULT_CLOSURE_CAP, EndoDesc, GroupDesc


def _fail(msg: str):
    raise SpecFileError(msg)


def parse_field(obj) -> Field:
    if not isinstance(obj, dict) or "kind" not in obj:
        _fail("field: expected an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "prime":
            return PrimeField(int(obj["p"]))
        if kind == "quadratic":
            poly = obj.get("poly")
            if not isinstance(poly, list) or len(poly) != 2:
                _fail("field: quadratic kind needs poly = [c0, c1] for w^2+c1*w+c0")
            return QuadraticField(int(obj["p"]), (poly[0], poly[1]))
        if kind == "rational":
            return RationalField()
        if kind == "real":
            return RealField()
        if kind == "complex":
            return ComplexField()
    except SpecFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        _fail(f"field: {exc}")
    _fail(f"field: unknown kind {kind!r}")


def parse_matrix(field: Field, obj, n: int, label: str) -> SquareMatrix:
    if not isinstance(obj, list) or len(obj) != n:
        _fail(f"{label}: expected {n} rows")
    for row in obj:
        if not isinstance(row, list) or len(row) != n:
            _fail(f"{label}: expected {n}x{n} entries")
    try:
        return SquareMatrix(field, [[field.parse_json(x) for x in row] for row in obj])
    except (TypeError, ValueError) as exc:
        _fail(f"{label}: bad entry ({exc})")


def parse_spec(obj) -> Tuple[str, object]:
    """('family', (id, params)) or ('loop', LoopSpec)."""
    if not isinstance(obj, dict):
        _fail("top level must be a JSON object")
    if "family" in obj:
        family = obj["family"]
        params = obj.get("params", {})
        if not isinstance(family, str):
            _fail("family id must be a string")
        if not isinstance(params, dict):
            _fail("params must be an object")
        return ("family", (family, params))
    for key in ("field", "n", "A", "B", "group", "delta"):
        if key not in obj:
            _fail(f"missing key {key!r}")
    field = parse_field(obj["field"])
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        _fail("n must be a positive integer")
    a_mat = parse_matrix(field, obj["A"], n, "A")
    b_mat = parse_matrix(field, obj["B"], n, "B")
    grp = obj["group"]
    if not isinstance(grp, dict) or "generators" not in grp:
        _fail("group: expected an object with 'generators'")
    gens = [
        parse_matrix(field, g, n, f"group.generators[{i}]")
        for i, g in enumerate(grp["generators"])
    ]
    cap = grp.get("cap", DEFAULT_CLOSURE_CAP)
    if not isinstance(cap, int) or cap < 1:
        _fail("group.cap must be a positive integer")
    delta = obj["delta"]
    if not isinstance(delta, dict) or "kind" not in delta:
        _fail("delta: expected an object with a 'kind'")
    kind = delta["kind"]
    if kind in ("identity", "zero"):
        endo = EndoDesc(kind)
    elif kind == "inner":
        endo = EndoDesc("inner", C=parse_matrix(field, delta.get("C"), n, "delta.C"))
    elif kind == "gen_images":
        images = delta.get("images")
        if not isinstance(images, list) or len(images) != len(gens):
            _fail("delta.images must list one matrix per generator")
        endo = EndoDesc("gen_images", images=[
            parse_matrix(field, m, n, f"delta.images[{i}]") for i, m in enumerate(images)
        ])
    else:
        _fail(f"delta: unknown kind {kind!r}")
    return ("loop", LoopSpec(field, n, a_mat, b_mat, GroupDesc(field, n, gens, cap), endo))


def load_spec_file(path: str) -> Tuple[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"{path}: invalid JSON ({exc})")
    return parse_spec(obj)


def field_to_json(field: Field) -> dict:
    if field.kind == "prime":
        return {"kind": "prime", "p": field.p}
    if field.kind == "quadratic":
        return {"kind": "quadratic", "p": field.p, "poly": [field.c0, field.c1]}
    return {"kind": field.kind}


def matrix_to_json(m: SquareMatrix) -> List[list]:
    return [[m.field.to_json(x.val) for x in row] for row in m.rows]


def loop_spec_to_json(spec: LoopSpec) -> dict:
    delta = {"kind": spec.delta.kind}
    if spec.delta.kind == "inner":
        delta["C"] = matrix_to_json(spec.delta.C)
    elif spec.delta.kind == "gen_images":
        delta["images"] = [matrix_to_json(m) for m in spec.delta.images]
    return {
        "field": field_to_json(spec.field),
        "n": spec.n,
        "A": matrix_to_json(spec.A),
        "B": matrix_to_json(spec.B),
        "group": {
            "generators": [matrix_to_json(g) for g in spec.group.generators],
            "cap": spec.group.closure_cap,
        },
        "delta": delta,
    }


def dump_spec_json(spec: LoopSpec) -> str:
    return json.dumps(loop_spec_to_json(spec), indent=2, sort_keys=True) + "\n"
