"""JSON output with fixed float formatting.

Floats are written with 17 significant digits (`%.17g`), which round-trips
every double and prints the same text on every platform.
"""

from __future__ import annotations

import json
import math
from typing import Any, List

from harmonic_core.angles import PI, TWO_PI


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = f"{x:.17g}"
    if s == "-0":
        s = "0"
    return s


def dumps(obj: Any) -> str:
    parts: List[str] = []
    _encode(obj, parts)
    return "".join(parts)


def _encode(obj: Any, out: List[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, complex):
        _encode([obj.real, obj.imag], out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k), ensure_ascii=False))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        # numpy scalars and the like
        _encode(float(obj), out)


def in_angle_range(x: float, angle_range: str) -> float:
    """Map a canonical [0, 2*pi) angle to the requested output range."""
    if angle_range == "pi" and x > PI:
        return x - TWO_PI
    return x
