"""Shared serialization for CLI results: table, CSV, and JSON renderers.

All real numbers are serialized with 17 significant digits in table and
CSV output, which round-trips binary64 exactly; JSON uses the shortest
round-trip representation native to the encoder. NaN means "undefined"
(for example a conditional mean with no qualifying replicates) and maps
to an empty CSV cell and a JSON null.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Mapping, Sequence

Row = Mapping[str, object]


def format_real(value: float) -> str:
    return "%.17g" % value


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "" if math.isnan(value) else format_real(value)
    return str(value)


def _columns(rows: Sequence[Row]) -> list[str]:
    columns = list(rows[0].keys())
    for row in rows:
        if list(row.keys()) != columns:
            raise ValueError("all rows must share one column set")
    return columns


def render_table(rows: Sequence[Row]) -> str:
    columns = _columns(rows)
    cells = [[_format_cell(row[c]) for c in columns] for row in rows]
    widths = [
        max(len(column), *(len(line[i]) for line in cells))
        for i, column in enumerate(columns)
    ]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for line in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(line, widths)))
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[Row]) -> str:
    columns = _columns(rows)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row[c]) for c in columns])
    return buffer.getvalue()


def _json_safe(value: object) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_json(rows: Sequence[Row], params: Mapping[str, object]) -> str:
    _columns(rows)
    document = {
        "schema_version": 1,
        "params": {k: _json_safe(v) for k, v in params.items()},
        "rows": [{k: _json_safe(v) for k, v in row.items()} for row in rows],
    }
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def emit(
    rows: Sequence[Row],
    params: Mapping[str, object],
    fmt: str,
    out_path: str | None,
) -> None:
    if fmt == "table":
        text = render_table(rows)
    elif fmt == "csv":
        text = render_csv(rows)
    elif fmt == "json":
        text = render_json(rows, params)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
