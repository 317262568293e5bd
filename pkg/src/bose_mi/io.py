"""Delimited-text and JSON output with a fixed, reproducible float format."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

__all__ = ["format_value", "render", "read_rows"]

FLOAT_FORMAT = "%.12e"


def format_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else FLOAT_FORMAT % x
    return str(x)


def _json_value(x):
    if isinstance(x, float):
        # round-trips through the CSV text so both formats carry the same digits
        return float(FLOAT_FORMAT % x) if math.isfinite(x) else None
    return x


def render(rows, columns, fmt: str = "csv") -> str:
    """Serialise ``rows`` (dicts) as CSV with a header or as a JSON array."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(r[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        data = [{c: _json_value(r[c]) for c in columns} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(text: str):
    if text == "":
        return ""
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_rows(source) -> list:
    """Read rows written by :func:`render`; JSON or CSV is detected from the content."""
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(stripped)
        return [{k: (math.nan if v is None else v) for k, v in r.items()} for r in rows]
    reader = csv.DictReader(io.StringIO(text))
    return [{k: _parse_cell(v) for k, v in r.items()} for r in reader]
