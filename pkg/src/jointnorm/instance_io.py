"""JSON instance files and report serialization.

Instance document::

    {"field": "real" | "complex",
     "domain": {"dim": n, "p": 2 | "inf"},
     "outer_p": 2 | "inf",
     "T": [{"codomain": {"dim": k, "p": ...}, "matrix": [[...], ...]}, ...],
     "S": [...],                      # optional, same shape as T
     "seed": 0, "meta": {...}}        # optional

Complex entries are ``[re, im]`` pairs.  Every parse error carries the JSON
path of the offending node, e.g. ``$.T[1].matrix[0][2]``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction

import numpy as np

from .errors import InstanceError
from .linops import Operator, OperatorTuple
from .spaces import COMPLEX, REAL, Exponent, LpSpace

__all__ = ["parse_instance", "load_instance", "instance_to_dict", "dump_instance",
           "to_jsonable", "dumps"]


def _exponent(node, path):
    if isinstance(node, bool) or not isinstance(node, (int, float, str)):
        raise InstanceError(path, f"exponent must be a number >= 1 or \"inf\", got {node!r}")
    if isinstance(node, float) and not math.isfinite(node):
        raise InstanceError(path, "write infinity as the string \"inf\"")
    try:
        return Exponent.of(node)
    except (ValueError, ZeroDivisionError) as e:
        raise InstanceError(path, str(e)) from None


def _dim(node, path):
    if isinstance(node, bool) or not isinstance(node, int) or node < 1:
        raise InstanceError(path, f"dimension must be a positive integer, got {node!r}")
    return node


def _space(node, path, field):
    if not isinstance(node, dict):
        raise InstanceError(path, "expected an object with keys dim and p")
    for key in ("dim", "p"):
        if key not in node:
            raise InstanceError(f"{path}.{key}", "missing")
    return LpSpace(_dim(node["dim"], f"{path}.dim"), _exponent(node["p"], f"{path}.p"), field)


def _number(node, path, field):
    if field == COMPLEX:
        if isinstance(node, list):
            if len(node) != 2:
                raise InstanceError(path, "complex entries are [re, im] pairs")
            re = _number(node[0], f"{path}[0]", REAL)
            im = _number(node[1], f"{path}[1]", REAL)
            return complex(re, im)
        return complex(_number(node, path, REAL))
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        if isinstance(node, list):
            raise InstanceError(path, "pair entries need \"field\": \"complex\"")
        raise InstanceError(path, f"expected a number, got {node!r}")
    if not math.isfinite(node):
        raise InstanceError(path, "entries must be finite")
    return float(node)


def _matrix(node, path, rows, cols, field):
    if not isinstance(node, list):
        raise InstanceError(path, "expected a list of rows")
    if len(node) != rows:
        raise InstanceError(path, f"expected {rows} rows (codomain dim), got {len(node)}")
    dtype = np.complex128 if field == COMPLEX else np.float64
    M = np.empty((rows, cols), dtype=dtype)
    for i, row in enumerate(node):
        rp = f"{path}[{i}]"
        if not isinstance(row, list):
            raise InstanceError(rp, "expected a row list")
        if len(row) != cols:
            raise InstanceError(rp, f"expected {cols} entries (domain dim), got {len(row)}")
        for j, v in enumerate(row):
            M[i, j] = _number(v, f"{rp}[{j}]", field)
    return M


def _components(node, path, dom, field, like=None):
    if not isinstance(node, list) or not node:
        raise InstanceError(path, "expected a non-empty list of components")
    if like is not None and len(node) != len(like):
        raise InstanceError(path, f"expected {len(like)} components to match T, got {len(node)}")
    comps = []
    for k, c in enumerate(node):
        cp = f"{path}[{k}]"
        if not isinstance(c, dict):
            raise InstanceError(cp, "expected an object with keys codomain and matrix")
        if "matrix" not in c:
            raise InstanceError(f"{cp}.matrix", "missing")
        if "codomain" in c:
            cod = _space(c["codomain"], f"{cp}.codomain", field)
        elif like is not None:
            cod = like[k].codomain
        else:
            raise InstanceError(f"{cp}.codomain", "missing")
        if like is not None and cod != like[k].codomain:
            raise InstanceError(f"{cp}.codomain", "must equal the codomain of the matching T component")
        M = _matrix(c["matrix"], f"{cp}.matrix", cod.dim, dom.dim, field)
        comps.append(Operator(M, dom, cod))
    return comps


def parse_instance(doc):
    """Build an :class:`~jointnorm.theorems.Instance` from a parsed JSON document."""
    from .theorems import Instance

    if not isinstance(doc, dict):
        raise InstanceError("$", "expected a JSON object")
    field = doc.get("field", REAL)
    if field not in (REAL, COMPLEX):
        raise InstanceError("$.field", f"must be \"real\" or \"complex\", got {field!r}")
    if "domain" not in doc:
        raise InstanceError("$.domain", "missing")
    dom = _space(doc["domain"], "$.domain", field)
    if "T" not in doc:
        raise InstanceError("$.T", "missing")
    Ts = _components(doc["T"], "$.T", dom, field)
    if "outer_p" in doc:
        outer = _exponent(doc["outer_p"], "$.outer_p")
    elif len(Ts) == 1:
        outer = Ts[0].codomain.p
    else:
        raise InstanceError("$.outer_p", "missing (required when T has several components)")
    T = OperatorTuple(tuple(Ts), outer)
    S = None
    if doc.get("S") is not None:
        S = OperatorTuple(tuple(_components(doc["S"], "$.S", dom, field, like=Ts)), outer)
    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise InstanceError("$.seed", f"must be an integer, got {seed!r}")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise InstanceError("$.meta", "must be an object")
    return Instance(T, S, str(meta.get("generator", "file")), seed, meta)


def load_instance(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_instance(doc)


def _entry(v, complex_):
    if complex_:
        return [float(v.real), float(v.imag)]
    return float(v.real) if isinstance(v, complex) else float(v)


def _components_doc(tup):
    cx = tup.field == COMPLEX
    return [{"codomain": {"dim": c.codomain.dim, "p": c.codomain.p.to_json()},
             "matrix": [[_entry(v, cx) for v in row] for row in c.matrix]} for c in tup]


def instance_to_dict(inst) -> dict:
    T = inst.T
    doc = {"field": T.field,
           "domain": {"dim": T.domain.dim, "p": T.domain.p.to_json()},
           "outer_p": T.outer_p.to_json(),
           "T": _components_doc(T)}
    if inst.S is not None:
        doc["S"] = _components_doc(inst.S)
    if inst.seed is not None:
        doc["seed"] = int(inst.seed)
    doc["meta"] = to_jsonable(inst.meta)
    return doc


def dump_instance(inst) -> str:
    return dumps(instance_to_dict(inst))


def to_jsonable(obj):
    """Plain JSON data from results: arrays become lists, complex numbers ``[re, im]``."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        status = getattr(obj, "status", None)
        if isinstance(status, str):
            out["status"] = status
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (Exponent, Fraction)):
        return obj.to_json() if isinstance(obj, Exponent) else float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
