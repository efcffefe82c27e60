"""Stable result tables in CSV and JSON.

Rows are sorted by (task, cost_fn, seed) and floats are written with six
decimal places, so emitting the same results twice gives the same bytes,
and the CSV and JSON forms of one result set carry identical values.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Optional, Sequence

RESULT_COLUMNS = (
    "task",
    "cost_fn",
    "acc_base",
    "acc_snap",
    "acc_bag",
    "acc_test_opt",
    "acc_test_worst",
    "overfit_gap",
    "snap_improvement",
    "overhead_pct",
    "seed",
)

_FLOAT_COLUMNS = {
    "acc_base",
    "acc_snap",
    "acc_bag",
    "acc_test_opt",
    "acc_test_worst",
    "overfit_gap",
    "snap_improvement",
    "overhead_pct",
}


def _as_row_dict(result) -> dict:
    if isinstance(result, dict):
        row = result
    else:
        row = result.to_row()
    missing = [c for c in RESULT_COLUMNS if c not in row]
    if missing:
        raise ValueError("result row is missing columns: %s" % ", ".join(missing))
    return row


def _sorted_rows(results: Sequence) -> list:
    rows = [_as_row_dict(r) for r in results]
    rows.sort(key=lambda r: (str(r["task"]), str(r["cost_fn"]), int(r["seed"])))
    return rows


def emit_report(results: Sequence, fmt: str = "csv",
                path: Optional[str] = None) -> str:
    """Render results as CSV or JSON text; optionally also write to a file."""
    rows = _sorted_rows(results)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    ("%.6f" % float(row[c])) if c in _FLOAT_COLUMNS else str(row[c])
                    for c in RESULT_COLUMNS
                ]
            )
        content = buf.getvalue()
    elif fmt == "json":
        out = []
        for row in rows:
            item = {}
            for c in RESULT_COLUMNS:
                if c in _FLOAT_COLUMNS:
                    item[c] = round(float(row[c]), 6)
                elif c == "seed":
                    item[c] = int(row[c])
                else:
                    item[c] = str(row[c])
            out.append(item)
        content = json.dumps(out, indent=2) + "\n"
    else:
        raise ValueError("unknown report format: %r (expected csv or json)" % fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    return content
