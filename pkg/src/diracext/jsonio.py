"""Deterministic JSON text: floats always printed with 17 significant digits."""

from __future__ import annotations

import json
import math

import numpy as np

SCHEMA_VERSION = 1


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _encode(obj, indent, level, out):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode([obj.real, obj.imag], indent, level, out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            out.append((sep if i else "") + pad + json.dumps(str(key)) + ": ")
            _encode(val, indent, level + 1, out)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[")
        for i, val in enumerate(items):
            out.append((sep if i else "") + pad)
            _encode(val, indent, level + 1, out)
        out.append(end + "]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), indent, level, out)
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    out: list[str] = []
    _encode(obj, indent, 0, out)
    return "".join(out)


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]
