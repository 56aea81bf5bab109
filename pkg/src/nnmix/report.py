"""Serialisation of experiment reports to JSON or CSV.

A report has a main table, optional JSON-only sections, and named plot
series.  In CSV mode the main table goes to the output path and each plot
series to a sibling ``<stem>.<name>.csv`` file.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    config: dict[str, Any]
    rows: list[dict[str, Any]]
    sections: dict[str, Any] = field(default_factory=dict)
    plots: dict[str, list[dict[str, Any]]] = field(default_factory=dict)

    def to_json_obj(self) -> dict[str, Any]:
        obj = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "rows": self.rows,
        }
        obj.update(self.sections)
        if self.plots:
            obj["plot_data"] = self.plots
        return _clean(obj)


def _clean(v):
    # JSON has no NaN/inf; emit null instead
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def to_json(report: Report) -> str:
    return json.dumps(report.to_json_obj(), indent=2, allow_nan=False) + "\n"


def _flatten(row: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def to_csv(rows: list[dict[str, Any]]) -> str:
    flat = [_flatten(r) for r in rows]
    fields: list[str] = []
    for r in flat:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return v


def write_report(report: Report, fmt: str, output: str | None) -> list[Path]:
    """Write the report; returns the paths written (empty when printing to stdout)."""
    if fmt == "json":
        text = to_json(report)
        if output is None:
            print(text, end="")
            return []
        path = Path(output)
        path.write_text(text, encoding="utf-8")
        return [path]
    text = to_csv(report.rows)
    if output is None:
        print(text, end="")
        return []
    path = Path(output)
    path.write_text(text, encoding="utf-8")
    written = [path]
    for name, series in report.plots.items():
        side = path.with_name(f"{path.stem}.{name}.csv")
        side.write_text(to_csv(series), encoding="utf-8")
        written.append(side)
    return written
