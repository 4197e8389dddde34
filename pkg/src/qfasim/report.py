"""Experiment tables rendered as aligned text, CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction

FORMATS = ("table", "csv", "json")
SIG_DIGITS = 12


def format_number(x) -> str:
    """Shared numeric text for every output format (12 significant digits)."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, numbers.Integral):
        return str(int(x))
    if isinstance(x, complex):
        if x.imag == 0:
            x = x.real
        else:
            return f"{format_number(x.real)}{'+' if x.imag >= 0 else '-'}{format_number(abs(x.imag))}j"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS}g}"


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (numbers.Number, Fraction)):
        return format_number(x)
    return str(x)


def _json_value(x):
    if x is None or isinstance(x, (str, bool)):
        return x
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, numbers.Real):
        v = float(format_number(x))
        return v if math.isfinite(v) else format_number(x)
    if isinstance(x, numbers.Complex):
        return [float(format_number(x.real)), float(format_number(x.imag))]
    return str(x)


@dataclass
class ExperimentReport:
    """Rows in input order; ``notes`` are key/value lines printed after the table."""

    columns: list
    rows: list = field(default_factory=list)
    title: str | None = None
    notes: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, expected {len(self.columns)}")
        self.rows.append(tuple(values))

    def render(self, fmt: str = "table") -> str:
        if fmt == "table":
            return self._table()
        if fmt == "csv":
            return self._csv()
        if fmt == "json":
            return self._json()
        raise ValueError(f"unknown format {fmt!r} (choose from {', '.join(FORMATS)})")

    def _table(self) -> str:
        cells = [[str(c) for c in self.columns]] + [[_cell(x) for x in r] for r in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = []
        if self.title:
            lines.append(self.title)
        for k, r in enumerate(cells):
            lines.append("  ".join(c.rjust(w) if k else c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        for key, value in self.notes.items():
            lines.append(f"{key}: {_cell(value)}")
        return "\n".join(lines)

    def _csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([_cell(x) for x in r])
        return out.getvalue().rstrip("\n")

    def _json(self) -> str:
        doc = {"columns": list(self.columns),
               "rows": [{c: _json_value(x) for c, x in zip(self.columns, r)} for r in self.rows]}
        if self.title:
            doc["title"] = self.title
        if self.notes:
            doc["notes"] = {k: _json_value(v) if not isinstance(v, (list, tuple)) else [_json_value(x) for x in v]
                            for k, v in self.notes.items()}
        return json.dumps(doc, indent=2, ensure_ascii=False)
