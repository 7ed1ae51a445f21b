"""Per-bound summary tables of a suite report as CSV, JSON or Markdown."""

from __future__ import annotations

import csv
import io
from typing import List, Optional

from .harness import SuiteReport
from .serialize import dumps, encode_float

FORMATS = ("csv", "json", "md")

COLUMNS = [
    "bound",
    "samples",
    "violations",
    "errors",
    "perturbed",
    "minMarginLog",
    "meanMarginLog",
    "equalityHits",
    "maxDiscrepancy",
    "status",
]


def _number(value: Optional[float]) -> str:
    if value is None:
        return ""
    encoded = encode_float(value)
    return encoded if isinstance(encoded, str) else f"{encoded:.6g}"


def summary_rows(report: SuiteReport) -> List[dict]:
    rows = []
    for name, s in report.stats.items():
        rows.append({
            "bound": name,
            "samples": s.samples,
            "violations": s.violations,
            "errors": s.errors,
            "perturbed": s.perturbed,
            "minMarginLog": _number(s.min_margin_log),
            "meanMarginLog": _number(s.mean_margin_log),
            "equalityHits": s.equality_hits,
            "maxDiscrepancy": _number(s.max_discrepancy),
            "status": "VIOLATION" if s.violations else ("ERROR" if s.errors else "ok"),
        })
    return rows


def to_csv(report: SuiteReport) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(summary_rows(report))
    return out.getvalue()


def to_json(report: SuiteReport) -> str:
    return dumps({"kind": report.kind, "seed": report.seed, "rows": summary_rows(report)})


def to_markdown(report: SuiteReport) -> str:
    lines = [
        f"# blockdet {report.kind} report (seed {report.seed})",
        "",
        "| " + " | ".join(COLUMNS) + " |",
        "|" + "|".join("---" for _ in COLUMNS) + "|",
    ]
    for row in summary_rows(report):
        cells = [str(row[c]) for c in COLUMNS]
        if row["violations"]:
            cells[0] = f"**{cells[0]}**"
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render(report: SuiteReport, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    if fmt == "md":
        return to_markdown(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
