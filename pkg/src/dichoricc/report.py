"""Deterministic JSON reports.

Key order follows insertion order, floats are written with 17 significant
digits and non-finite floats as the strings ``"inf"``, ``"-inf"``, ``"nan"``;
complex numbers become ``[re, im]`` and matrices rows of such pairs.
"""

import dataclasses
import json
import math

import numpy as np

from ._errors import DichoRiccError

TOOL = "dichoricc"


def _float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_jsonable(obj):
    """Recursively convert results into plain JSON-compatible values."""
    if isinstance(obj, DichoRiccError):
        return {"code": obj.code, "message": str(obj), "details": to_jsonable(obj.details)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 0:
                return to_jsonable(complex(obj))
            return [to_jsonable(v) for v in obj]
        return [to_jsonable(v) for v in obj.tolist()] if obj.ndim else to_jsonable(obj.item())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _emit(value, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for k, (key, v) in enumerate(items):
            out.append(pad + json.dumps(key) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(value, list):
        if not value:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list)) for v in value):
            out.append("[" + ", ".join(_scalar(v) for v in value) + "]")
            return
        out.append("[\n")
        for k, v in enumerate(value):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if k < len(value) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_scalar(value))


def _scalar(v):
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, int):
        return str(v)
    return json.dumps(v)


def dumps(obj, indent=2):
    """Serialize ``obj`` (after :func:`to_jsonable`) byte-reproducibly."""
    out = []
    _emit(to_jsonable(obj), indent, 0, out)
    return "".join(out) + "\n"


def make_report(command, result, tolerances, seed, version, errors=None, status=None):
    errors = list(errors or [])
    if status is None:
        status = "ok" if not errors else "hypothesis_failure"
    return {
        "tool": TOOL,
        "version": version,
        "command": command,
        "status": status,
        "seed": int(seed),
        "tolerances": dict(tolerances),
        "result": result,
        "errors": errors,
    }
