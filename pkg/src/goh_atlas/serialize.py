"""Deterministic JSON/CSV emission.

Floats are rendered with 17 significant digits so that reruns with the
same flags and seed produce byte-identical artifacts.
"""

from __future__ import annotations

import sys
from fractions import Fraction


def _render_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("non-finite float has no JSON rendering")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def _emit(obj, parts: list, indent: int, pad: str):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(_render_float(obj))
    elif isinstance(obj, Fraction):
        parts.append(f'"{obj}"')
    elif isinstance(obj, str):
        parts.append(f'"{_escape(obj)}"')
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{\n")
        inner = pad + " " * indent
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be strings, got {k!r}")
            parts.append(f'{inner}"{_escape(k)}": ')
            _emit(v, parts, indent, inner)
            parts.append(",\n" if i + 1 < len(obj) else "\n")
        parts.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            parts.append("[]")
            return
        scalars = all(not isinstance(v, (dict, list, tuple)) for v in seq)
        if scalars and len(seq) <= 16:
            parts.append("[")
            for i, v in enumerate(seq):
                _emit(v, parts, indent, pad)
                if i + 1 < len(seq):
                    parts.append(", ")
            parts.append("]")
            return
        parts.append("[\n")
        inner = pad + " " * indent
        for i, v in enumerate(seq):
            parts.append(inner)
            _emit(v, parts, indent, inner)
            parts.append(",\n" if i + 1 < len(seq) else "\n")
        parts.append(pad + "]")
    elif hasattr(obj, "tolist"):  # numpy scalars and arrays
        _emit(obj.tolist(), parts, indent, pad)
    elif hasattr(obj, "to_json"):
        _emit(obj.to_json(), parts, indent, pad)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    parts: list = []
    _emit(obj, parts, indent, "")
    parts.append("\n")
    return "".join(parts)


def write_output(text: str, out: str | None):
    """Write to a file, or stdout when out is None or '-'."""
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def curve_csv(ts, points, header: str | None = None) -> str:
    m = len(points[0])
    head = header or ("t," + ",".join(f"x{j + 1}" for j in range(m)))
    lines = [head]
    for t, row in zip(ts, points):
        lines.append(",".join([format(float(t), ".17g")]
                              + [format(float(v), ".17g") for v in row]))
    return "\n".join(lines) + "\n"
