"""Benchmark table rendering with per-column severity shading.

Each numeric column is binned into tertiles: lowest third unshaded, middle
third light, top third dark, ties sharing the lower shade.  Markdown marks
light cells with *emphasis* and dark cells with **strong emphasis**; CSV
and JSON carry the shade as an explicit field.  Rendering is a pure
function of its inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

from .metrics import SystemReport

COLUMNS = ("system", "wer", "all", "lex", "gram", "cotx", "fail")
HEADERS = {
    "system": "System",
    "wer": "WER",
    "all": "All",
    "lex": "Lex",
    "gram": "Gram",
    "cotx": "Cotx",
    "fail": "Fail",
}
SHADES = ("none", "light", "dark")

FORMATS = ("md", "csv", "json")


class ReportError(ValueError):
    """Raised for unknown formats or empty shading input."""


def shade_column(values: Sequence[float]) -> list[str]:
    """Tertile shades for one column; ties share the lower shade."""
    if not values:
        raise ReportError("cannot shade an empty column")
    vals = [float(v) for v in values]
    ordered = sorted(vals)
    n = len(ordered)
    q1 = ordered[math.ceil(n / 3) - 1]
    q2 = ordered[math.ceil(2 * n / 3) - 1]
    return ["none" if v <= q1 else "light" if v <= q2 else "dark" for v in vals]


@dataclass(frozen=True)
class Cell:
    value: str
    shade: str


@dataclass(frozen=True)
class RenderedTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, tuple[Cell, ...]], ...]  # (system, data cells)


def _format_wer(wer: float | None) -> str:
    return "" if wer is None else f"{wer:.2f}"


def build_table(
    reports: Sequence[SystemReport],
    aggregate: SystemReport | None = None,
) -> RenderedTable:
    """Assemble the table; the optional aggregate row leads and is unshaded."""
    numeric_columns = COLUMNS[1:]
    shades: dict[str, list[str]] = {}
    for col in numeric_columns:
        if not reports:
            shades[col] = []
            continue
        if col == "wer":
            cells = [r.wer for r in reports]
            if any(v is None for v in cells):
                shades[col] = ["none"] * len(reports)
            else:
                shades[col] = shade_column([float(v) for v in cells])  # type: ignore[arg-type]
        elif col == "all":
            shades[col] = shade_column([float(r.rates.all_rate) for r in reports])
        else:
            shades[col] = shade_column([float(r.rates.rate(col)) for r in reports])

    def data_cells(report: SystemReport, row_shades: Sequence[str]) -> tuple[Cell, ...]:
        values = [
            _format_wer(report.wer),
            report.rates.all_display,
            report.rates.display("lex"),
            report.rates.display("gram"),
            report.rates.display("cotx"),
            report.rates.display("fail"),
        ]
        return tuple(Cell(v, s) for v, s in zip(values, row_shades))

    rows: list[tuple[str, tuple[Cell, ...]]] = []
    if aggregate is not None:
        rows.append((aggregate.system_id, data_cells(aggregate, ["none"] * 6)))
    for i, report in enumerate(reports):
        row_shades = [shades[col][i] for col in numeric_columns]
        rows.append((report.system_id, data_cells(report, row_shades)))
    return RenderedTable(columns=COLUMNS, rows=tuple(rows))


def _md_cell(cell: Cell) -> str:
    if not cell.value:
        return ""
    if cell.shade == "dark":
        return f"**{cell.value}**"
    if cell.shade == "light":
        return f"*{cell.value}*"
    return cell.value


def render(
    reports: Sequence[SystemReport],
    fmt: str,
    aggregate: SystemReport | None = None,
    meta: dict | None = None,
) -> str:
    """Render reports as 'md', 'csv' or 'json'.

    ``meta`` (significance threshold and its inputs, ranking weight) lands
    in a Markdown footer and in the JSON document; CSV stays data-only.
    """
    if fmt not in FORMATS:
        raise ReportError(f"unknown format {fmt!r} (expected one of {FORMATS})")
    table = build_table(reports, aggregate)
    if fmt == "md":
        lines = [
            "| " + " | ".join(HEADERS[c] for c in table.columns) + " |",
            "| " + " | ".join("---" for _ in table.columns) + " |",
        ]
        for system_id, cells in table.rows:
            lines.append(
                "| " + " | ".join([system_id] + [_md_cell(c) for c in cells]) + " |"
            )
        if meta:
            lines.append("")
            lines.append(
                "Shading: per-column tertiles; *light* = middle third, "
                "**dark** = top third."
            )
            for key in sorted(meta):
                lines.append(f"- {key}: {meta[key]}")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        shade_headers = [f"{c}_shade" for c in table.columns[1:]]
        writer.writerow(list(table.columns) + shade_headers)
        for system_id, cells in table.rows:
            writer.writerow(
                [system_id]
                + [c.value for c in cells]
                + [c.shade for c in cells]
            )
        return buf.getvalue()
    doc = {
        "columns": list(table.columns),
        "rows": [
            {
                "system": system_id,
                "cells": {
                    col: {"value": cell.value, "shade": cell.shade}
                    for col, cell in zip(table.columns[1:], cells)
                },
            }
            for system_id, cells in table.rows
        ],
        "meta": meta or {},
    }
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
