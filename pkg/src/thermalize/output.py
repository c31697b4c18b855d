"""Deterministic CSV/JSON writers.

Floats are written with ``repr`` (shortest round-trip form), big integers
in full, and missing values as empty CSV fields or JSON ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from . import __version__

__all__ = ["format_value", "with_log_columns", "to_csv", "to_json", "metadata"]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _log_or_none(p):
    if p is None or p <= 0:
        return None
    return math.log(p)


def with_log_columns(rows: Iterable[dict], columns: Sequence[str]) -> list[dict]:
    """Append ``ln_<col>`` next to each probability column."""
    out = []
    for row in rows:
        row = dict(row)
        for col in columns:
            row["ln_" + col] = _log_or_none(row.get(col))
        out.append(row)
    return out


def to_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def metadata(config_hash: str, seed: int | None, command: str, **extra) -> dict:
    meta = {"config_hash": config_hash, "version": __version__, "seed": seed,
            "command": command}
    meta.update(extra)
    return meta
