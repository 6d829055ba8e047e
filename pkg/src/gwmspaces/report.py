"""Deterministic JSON rendering for reports.

Keys are sorted, rationals are already strings, and doubles are written with
17 significant digits so the same value always produces the same bytes.
"""
from __future__ import annotations

import json
import math

SCHEMA = "gwmspaces.report/1"
NON_GOLDEN_KEYS = ("timing",)


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = f"{x:.17g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def golden_body(report: dict) -> dict:
    """The part of a report that must be byte-identical across runs."""
    return {k: v for k, v in report.items() if k not in NON_GOLDEN_KEYS}
